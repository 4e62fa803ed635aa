// DOM rendering. Rebuilt from the view model on every change; handlers are
// injected so the controller owns all state transitions.

import type { RankView } from "./api.js";
import type { SessionViewModel } from "./model.js";

export interface Handlers {
  onTogglePin(photoId: string): void;
  onSolve(): void;
  onControlsChange(patch: Partial<SessionViewModel>): void;
  onLoadFile(file: File): void;
  onLoadId(id: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function scoreBar(score: number, min: number, max: number): HTMLElement {
  const bar = el("div", "score-bar");
  const fill = el("div", "score-bar-fill");
  const span = max - min || 1;
  fill.style.width = `${Math.round(((score - min) / span) * 100)}%`;
  bar.appendChild(fill);
  return bar;
}

function rankList(title: string, view: RankView): HTMLElement {
  const box = el("div", "rank-box");
  box.appendChild(el("h3", undefined, title));
  box.appendChild(el("div", "protected-k",
    `protected-k: ${view.protected_k}`));
  const list = el("ol", "rank-list");
  for (const entry of view.top) {
    const item = el("li", entry.is_true ? "rank-true" : "rank-other",
      `cell ${entry.location} (${entry.score.toFixed(3)})`);
    list.appendChild(item);
  }
  box.appendChild(list);
  return box;
}

export function render(root: HTMLElement, vm: SessionViewModel, handlers: Handlers): void {
  root.textContent = "";

  const loader = el("div", "loader");
  const fileInput = el("input") as HTMLInputElement;
  fileInput.type = "file";
  fileInput.accept = "application/json";
  fileInput.id = "instance-file";
  fileInput.addEventListener("change", () => {
    if (fileInput.files?.[0]) handlers.onLoadFile(fileInput.files[0]);
  });
  loader.appendChild(fileInput);
  const idInput = el("input") as HTMLInputElement;
  idInput.type = "text";
  idInput.placeholder = "or instance id";
  idInput.id = "instance-id";
  const idButton = el("button", undefined, "Fetch");
  idButton.id = "load-id";
  idButton.addEventListener("click", () => {
    if (idInput.value.trim()) handlers.onLoadId(idInput.value.trim());
  });
  loader.append(idInput, idButton);
  root.appendChild(loader);

  if (vm.banner) {
    const banner = el("div", "banner", vm.banner);
    banner.id = "banner";
    root.appendChild(banner);
  }

  if (!vm.instanceId) {
    root.appendChild(el("p", "hint", "Load an instance JSON file to begin."));
    return;
  }

  const controls = el("div", "controls");
  const variant = el("select") as HTMLSelectElement;
  variant.id = "variant";
  for (const value of ["topk", "budget"]) {
    const opt = el("option", undefined, value) as HTMLOptionElement;
    opt.value = value;
    variant.appendChild(opt);
  }
  variant.value = vm.variant;
  variant.addEventListener("change", () => {
    handlers.onControlsChange({ variant: variant.value as "topk" | "budget" });
  });
  controls.appendChild(variant);

  const param = el("input") as HTMLInputElement;
  param.type = "number";
  param.id = "param";
  param.min = vm.variant === "topk" ? "1" : "0";
  param.max = vm.variant === "topk"
    ? String(vm.numLocations - 1)
    : String(vm.photos.length - 1);
  param.value = String(vm.variant === "topk" ? vm.k : vm.d);
  param.addEventListener("change", () => {
    const value = Number(param.value);
    handlers.onControlsChange(vm.variant === "topk" ? { k: value } : { d: value });
  });
  controls.appendChild(param);

  const margin = el("input") as HTMLInputElement;
  margin.type = "range";
  margin.id = "margin";
  margin.min = "0";
  margin.max = "2";
  margin.step = "0.25";
  margin.value = String(vm.margin);
  margin.addEventListener("change", () => {
    handlers.onControlsChange({ margin: Number(margin.value) });
  });
  controls.appendChild(margin);
  controls.appendChild(el("span", "margin-label", `margin ${vm.margin}`));

  const solveButton = el("button", "solve", vm.solving ? "Solving..." : "Solve");
  solveButton.id = "solve";
  solveButton.disabled = vm.solving;
  solveButton.addEventListener("click", () => handlers.onSolve());
  controls.appendChild(solveButton);
  root.appendChild(controls);

  if (vm.result) {
    const status = el("div", "status");
    status.id = "status";
    status.textContent =
      `deleted ${vm.result.deleted.length} photo(s), ` +
      `protected-k ${vm.result.protectedK}` +
      (vm.result.provedOptimal ? " (optimal)" : " (not proved optimal)");
    root.appendChild(status);
  }

  const grid = el("div", "cards");
  const scores = vm.photos.map((p) => p.trueScore);
  const min = Math.min(...scores);
  const max = Math.max(...scores);
  for (const photo of vm.photos) {
    const classes = ["card"];
    if (photo.pinned) classes.push("pinned");
    if (photo.deleted && !photo.pinned) classes.push("deleted");
    const card = el("div", classes.join(" "));
    card.dataset.photoId = photo.id;
    if (photo.imageUrl) {
      const img = el("img", "thumb") as HTMLImageElement;
      img.src = photo.imageUrl;
      card.appendChild(img);
    }
    card.appendChild(el("div", "card-id", photo.id));
    card.appendChild(el("div", "card-score", photo.trueScore.toFixed(3)));
    card.appendChild(scoreBar(photo.trueScore, min, max));
    const pin = el("button", "pin", photo.pinned ? "Unpin" : "Pin");
    pin.addEventListener("click", () => handlers.onTogglePin(photo.id));
    card.appendChild(pin);
    grid.appendChild(card);
  }
  root.appendChild(grid);

  const ranks = el("div", "ranks");
  if (vm.result) {
    ranks.appendChild(rankList("Before", vm.result.before));
    ranks.appendChild(rankList("After", vm.result.after));
  } else if (vm.baseline) {
    ranks.appendChild(rankList("Current collection", vm.baseline));
  }
  root.appendChild(ranks);
}
