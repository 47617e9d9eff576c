/** Bootstrap: connect to the service and wire inputs to the session. */

import { ApiError, PlayServiceClient } from "./api.js";
import {
  applyBatch,
  applyConnectionError,
  applyRejection,
  applySnapshot,
  initialView,
  keyBindings,
  UiSessionView,
} from "./model.js";
import { render, renderPalette } from "./ui.js";

const FRAME_DELAY_MS = 14;

let view: UiSessionView = initialView();
let client: PlayServiceClient | null = null;

function update(next: UiSessionView): void {
  view = next;
  render(view);
}

async function animate(frames: { frame: number }[]): Promise<void> {
  // step the arena through intermediate frames; gauges stay on server values
  for (const frame of frames) {
    update({ ...view, ...projectFrame(frame) });
    await new Promise((resolve) => setTimeout(resolve, FRAME_DELAY_MS));
  }
}

function projectFrame(frame: any): Partial<UiSessionView> {
  return { player: frame.player, ai: frame.ai, frame: frame.frame };
}

async function sendAction(action: string): Promise<void> {
  if (!client || !view.sessionId || view.busy || view.finished) return;
  update({ ...view, busy: true });
  try {
    const batch = await client.sendAction(view.sessionId, action);
    await animate(batch.frames);
    update({ ...applyBatch(view, batch), busy: false });
  } catch (err) {
    if (err instanceof ApiError) {
      update({ ...applyRejection(view, err.message), busy: false });
    } else {
      update({
        ...applyConnectionError(view, `service unreachable: ${err}`),
        busy: false,
      });
    }
  }
}

async function connect(): Promise<void> {
  const base = (document.getElementById("service-url") as HTMLInputElement).value;
  const debug = (document.getElementById("debug-toggle") as HTMLInputElement).checked;
  const agentKind = (document.getElementById("agent-select") as HTMLSelectElement).value;
  client = new PlayServiceClient(base.replace(/\/$/, ""));
  update({ ...initialView(), busy: true });
  try {
    if (view.sessionId) {
      await client.closeSession(view.sessionId).catch(() => undefined);
    }
    const snap = await client.createSession({
      agent: { kind: agentKind },
      debug,
    });
    update({ ...applySnapshot(initialView(), snap), busy: false });
    renderPalette(view, (action) => void sendAction(action));
    render(view);
  } catch (err) {
    update({
      ...applyConnectionError(initialView(), `cannot reach service: ${err}`),
      busy: false,
    });
  }
}

function onKeydown(event: KeyboardEvent): void {
  if (event.repeat) return;
  const bindings = keyBindings(view.roster);
  const action = bindings.get(event.key);
  if (action) {
    event.preventDefault();
    void sendAction(action);
  }
}

document.getElementById("connect")!.addEventListener("click", () => void connect());
document.addEventListener("keydown", onKeydown);
render(view);
