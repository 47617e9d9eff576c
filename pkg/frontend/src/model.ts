/**
 * Pure view-model for the play console.
 *
 * Gauges always carry the most recent server-sent values verbatim: bal,
 * momenta, and pdr are copied from responses, never recomputed or
 * extrapolated on the client (the service guarantees their consistency,
 * and the tests inject deliberately inconsistent payloads to prove the
 * client does not second-guess them).
 */

import type {
  CharView,
  FrameBatch,
  Momenta,
  Outcome,
  RosterEntry,
  SessionSnapshot,
} from "./types.js";

export interface UiSessionView {
  sessionId: string | null;
  connectionError: string | null;
  rejection: string | null;
  busy: boolean; // one in-flight request at a time
  player: CharView | null;
  ai: CharView | null;
  frame: number;
  bal: number | null;
  momenta: Momenta | null;
  pdr: number | null;
  outcome: Outcome | null;
  roster: RosterEntry[];
  finished: boolean;
}

export function initialView(): UiSessionView {
  return {
    sessionId: null,
    connectionError: null,
    rejection: null,
    busy: false,
    player: null,
    ai: null,
    frame: 0,
    bal: null,
    momenta: null,
    pdr: null,
    outcome: null,
    roster: [],
    finished: false,
  };
}

export function applySnapshot(view: UiSessionView, snap: SessionSnapshot): UiSessionView {
  return {
    ...view,
    sessionId: snap.id,
    connectionError: null,
    rejection: null,
    player: snap.player,
    ai: snap.ai,
    frame: snap.frame,
    bal: snap.bal,
    momenta: snap.momenta,
    pdr: snap.pdr ?? view.pdr,
    outcome: snap.outcome ?? null,
    roster: snap.roster ?? view.roster,
    finished: snap.phase === "FINISHED" || snap.outcome != null,
  };
}

export function applyBatch(view: UiSessionView, batch: FrameBatch): UiSessionView {
  const last = batch.frames[batch.frames.length - 1];
  return {
    ...view,
    rejection: null,
    player: last ? last.player : view.player,
    ai: last ? last.ai : view.ai,
    frame: last ? last.frame : view.frame,
    bal: batch.bal,
    momenta: batch.momenta,
    pdr: batch.pdr ?? view.pdr,
    outcome: batch.outcome ?? view.outcome,
    finished: view.finished || batch.outcome != null,
  };
}

export function applyRejection(view: UiSessionView, reason: string): UiSessionView {
  return { ...view, rejection: reason };
}

export function applyConnectionError(view: UiSessionView, reason: string): UiSessionView {
  return { ...view, connectionError: reason };
}

/** Default key bindings: number row in roster order. */
export function keyBindings(roster: RosterEntry[]): Map<string, string> {
  const keys = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "0", "-", "="];
  const map = new Map<string, string>();
  roster.forEach((entry, i) => {
    if (i < keys.length) {
      map.set(keys[i], entry.id);
    }
  });
  return map;
}
