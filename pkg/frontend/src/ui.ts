/** DOM rendering: a dumb projection of the view-model onto the page. */

import type { UiSessionView } from "./model.js";
import { keyBindings } from "./model.js";

const SEGMENTS = ["right_arm", "left_arm", "right_leg", "left_leg"] as const;
const SEGMENT_LABELS: Record<(typeof SEGMENTS)[number], string> = {
  right_arm: "R arm",
  left_arm: "L arm",
  right_leg: "R leg",
  left_leg: "L leg",
};
const ARENA_WIDTH = 800;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function renderPalette(
  view: UiSessionView,
  onAction: (action: string) => void,
): void {
  const palette = el<HTMLDivElement>("palette");
  palette.textContent = "";
  const bindings = keyBindings(view.roster);
  const keyOf = new Map<string, string>();
  bindings.forEach((action, key) => keyOf.set(action, key));
  for (const entry of view.roster) {
    const button = document.createElement("button");
    const key = keyOf.get(entry.id);
    button.className = "action";
    button.dataset.action = entry.id;
    button.innerHTML = `<span class="key">${key ?? ""}</span>${entry.id}` +
      (entry.damage > 0 ? `<span class="dmg">${entry.damage}</span>` : "");
    button.addEventListener("click", () => onAction(entry.id));
    palette.appendChild(button);
  }
}

export function render(view: UiSessionView): void {
  el("session-id").textContent = view.sessionId ?? "-";

  const error = el("error-banner");
  error.hidden = view.connectionError === null;
  error.textContent = view.connectionError ?? "";

  const rejection = el("rejection");
  rejection.hidden = view.rejection === null;
  rejection.textContent = view.rejection ?? "";

  for (const side of ["player", "ai"] as const) {
    const ch = view[side];
    const hp = ch ? ch.hp : 150;
    el(`${side}-hp-fill`).style.width = `${(hp / 150) * 100}%`;
    el(`${side}-hp-label`).textContent = `${hp}`;
    el(`${side}-phase`).textContent = ch ? ch.phase : "-";
    if (ch) {
      el(`${side}-fighter`).style.left = `${(ch.x / ARENA_WIDTH) * 100}%`;
    }
  }
  el("frame-counter").textContent = `frame ${view.frame}`;

  const bal = view.bal;
  el("bal-fill").style.width = bal === null ? "0%" : `${bal * 100}%`;
  el("bal-label").textContent = bal === null ? "-" : bal.toFixed(4);

  for (const segment of SEGMENTS) {
    const value = view.momenta ? view.momenta[segment] : 0;
    const scale = view.momenta
      ? Math.max(...SEGMENTS.map((s) => view.momenta![s]), 1e-9)
      : 1;
    el(`momentum-${segment}`).style.width = `${(value / scale) * 100}%`;
    el(`momentum-${segment}-label`).textContent =
      `${SEGMENT_LABELS[segment]} ${value.toFixed(2)}`;
  }

  const pdrRow = el("pdr-row");
  pdrRow.hidden = view.pdr === null;
  if (view.pdr !== null) {
    el("pdr-fill").style.width = `${view.pdr * 100}%`;
    el("pdr-label").textContent = view.pdr.toFixed(3);
  }

  const banner = el("outcome-banner");
  banner.hidden = view.outcome === null;
  if (view.outcome) {
    const who =
      view.outcome.winner === "DRAW" ? "draw" : `${view.outcome.winner} wins`;
    banner.textContent =
      `${who} - hp diff ${view.outcome.hp_diff} at frame ${view.outcome.end_frame}`;
  }

  const disabled = view.busy || view.finished || view.sessionId === null;
  document
    .querySelectorAll<HTMLButtonElement>("#palette button")
    .forEach((b) => (b.disabled = disabled));
}
