/**
 * Pure view-model for the play console.
 *
 * Gauges always carry the most recent server-sent values verbatim: bal,
 * momenta, and pdr are copied from responses, never recomputed or
 * extrapolated on the client (the service guarantees their consistency,
 * and the tests inject deliberately inconsistent payloads to prove the
 * client does not second-guess them).
 */
export function initialView() {
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
export function applySnapshot(view, snap) {
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
export function applyBatch(view, batch) {
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
export function applyRejection(view, reason) {
    return { ...view, rejection: reason };
}
export function applyConnectionError(view, reason) {
    return { ...view, connectionError: reason };
}
/** Default key bindings: number row in roster order. */
export function keyBindings(roster) {
    const keys = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "0", "-", "="];
    const map = new Map();
    roster.forEach((entry, i) => {
        if (i < keys.length) {
            map.set(keys[i], entry.id);
        }
    });
    return map;
}
