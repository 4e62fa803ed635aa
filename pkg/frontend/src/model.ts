// Session state and its pure update functions. The view model only ever
// stores numbers the server sent back; pinned cards can never be shown as
// deleted, and a stale plan mark is cleared the moment a photo is pinned.

import type { InstanceSummary, RankView, SolveResponse } from "./api.js";

export interface PhotoCard {
  id: string;
  trueScore: number;
  pinned: boolean;
  deleted: boolean;
  imageUrl?: string;
}

export interface SolveResult {
  deleted: string[];
  protectedK: number;
  provedOptimal: boolean;
  planStatus: string;
  before: RankView;
  after: RankView;
}

export interface SessionViewModel {
  instanceId: string | null;
  numLocations: number;
  trueLocation: number;
  photos: PhotoCard[];
  baseline: RankView | null;
  variant: "topk" | "budget";
  k: number;
  d: number;
  margin: number;
  solving: boolean;
  banner: string | null;
  result: SolveResult | null;
}

export function emptySession(): SessionViewModel {
  return {
    instanceId: null,
    numLocations: 0,
    trueLocation: 0,
    photos: [],
    baseline: null,
    variant: "topk",
    k: 1,
    d: 0,
    margin: 0,
    solving: false,
    banner: null,
    result: null,
  };
}

export function sessionFromSummary(
  summary: InstanceSummary,
  imageUrls?: Record<string, string>,
): SessionViewModel {
  const photos = summary.photo_scores
    .map((p) => ({
      id: p.id,
      trueScore: p.true_score,
      pinned: false,
      deleted: false,
      imageUrl: imageUrls?.[p.id],
    }))
    .sort((a, b) => b.trueScore - a.trueScore || a.id.localeCompare(b.id));
  return {
    ...emptySession(),
    instanceId: summary.id,
    numLocations: summary.num_locations,
    trueLocation: summary.true_location,
    photos,
    baseline: { top: summary.top, protected_k: summary.protected_k },
    k: 1,
    d: Math.min(1, summary.num_photos - 1),
  };
}

export function togglePin(vm: SessionViewModel, photoId: string): SessionViewModel {
  return {
    ...vm,
    photos: vm.photos.map((p) =>
      p.id === photoId
        ? { ...p, pinned: !p.pinned, deleted: !p.pinned ? false : p.deleted }
        : p,
    ),
  };
}

export function pinnedIds(vm: SessionViewModel): string[] {
  return vm.photos.filter((p) => p.pinned).map((p) => p.id);
}

export function startSolve(vm: SessionViewModel): SessionViewModel {
  return { ...vm, solving: true, banner: null };
}

export function applySolve(vm: SessionViewModel, resp: SolveResponse): SessionViewModel {
  const deleted = new Set(resp.plan.deleted);
  return {
    ...vm,
    solving: false,
    banner: null,
    photos: vm.photos.map((p) => ({ ...p, deleted: !p.pinned && deleted.has(p.id) })),
    result: {
      deleted: resp.plan.deleted,
      protectedK: resp.after.protected_k,
      provedOptimal: resp.report.proved_optimal,
      planStatus: resp.plan.status,
      before: resp.before,
      after: resp.after,
    },
  };
}

export function applyFailure(vm: SessionViewModel, message: string): SessionViewModel {
  // prior cards and result stay on screen; only the banner changes
  return { ...vm, solving: false, banner: message };
}
