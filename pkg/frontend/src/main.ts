// Controller: owns the session state, talks to the service through the
// typed client, and re-renders after every transition. Only one solve may
// be in flight; the Solve button stays disabled until the server answers.

import { ApiClient, ApiError } from "./api.js";
import {
  applyFailure,
  applySolve,
  emptySession,
  pinnedIds,
  sessionFromSummary,
  startSolve,
  togglePin,
  type SessionViewModel,
} from "./model.js";
import { render, type Handlers } from "./view.js";

export interface App {
  state(): SessionViewModel;
  loadInstanceData(data: unknown): Promise<void>;
  loadInstanceId(id: string): Promise<void>;
  togglePin(photoId: string): void;
  setControls(patch: Partial<SessionViewModel>): void;
  solve(): Promise<void>;
}

export function createApp(root: HTMLElement, baseUrl: string): App {
  const client = new ApiClient(baseUrl);
  let vm = emptySession();

  const handlers: Handlers = {
    onTogglePin: (id) => app.togglePin(id),
    onSolve: () => void app.solve(),
    onControlsChange: (patch) => app.setControls(patch),
    onLoadFile: (file) => void loadFile(file),
    onLoadId: (id) => void app.loadInstanceId(id),
  };

  function update(next: SessionViewModel): void {
    vm = next;
    render(root, vm, handlers);
  }

  async function loadFile(file: File): Promise<void> {
    let data: unknown;
    try {
      data = JSON.parse(await file.text());
    } catch (err) {
      update(applyFailure(vm, `not a JSON file: ${String(err)}`));
      return;
    }
    await app.loadInstanceData(data);
  }

  const app: App = {
    state: () => vm,

    async loadInstanceData(data: unknown): Promise<void> {
      try {
        const id = await client.uploadInstance(data);
        const summary = await client.fetchSummary(id);
        const urls = (data as { photo_urls?: Record<string, string> })?.photo_urls;
        update(sessionFromSummary(summary, urls));
      } catch (err) {
        update(applyFailure(vm, err instanceof ApiError
          ? err.message
          : `load failed: ${String(err)}`));
      }
    },

    async loadInstanceId(id: string): Promise<void> {
      try {
        update(sessionFromSummary(await client.fetchSummary(id)));
      } catch (err) {
        update(applyFailure(vm, err instanceof ApiError
          ? err.message
          : `load failed: ${String(err)}`));
      }
    },

    togglePin(photoId: string): void {
      update(togglePin(vm, photoId));
    },

    setControls(patch: Partial<SessionViewModel>): void {
      update({ ...vm, ...patch });
    },

    async solve(): Promise<void> {
      if (vm.solving || !vm.instanceId) return;
      update(startSolve(vm));
      try {
        const resp = await client.solve(vm.instanceId, {
          variant: vm.variant,
          k: vm.variant === "topk" ? vm.k : undefined,
          d: vm.variant === "budget" ? vm.d : undefined,
          margin: vm.margin,
          keep: pinnedIds(vm),
        });
        update(applySolve(vm, resp));
      } catch (err) {
        update(applyFailure(vm, err instanceof ApiError
          ? err.message
          : `solve failed: ${String(err)}`));
      }
    },
  };

  update(vm);
  return app;
}

declare global {
  interface Window {
    geocensorApp?: App;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const base = new URLSearchParams(location.search).get("service")
    ?? "http://127.0.0.1:8337";
  window.geocensorApp = createApp(document.getElementById("app")!, base);
}
