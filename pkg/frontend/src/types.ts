/** Wire types for the play-service JSON HTTP interface. */

export interface CharView {
  hp: number;
  x: number;
  phase: string;
}

export interface HitEventView {
  attacker: "PLAYER" | "AI";
  action: string;
  damage_dealt: number;
  blocked: boolean;
}

export interface FrameView {
  frame: number;
  player: CharView;
  ai: CharView;
  events: HitEventView[];
}

export interface Momenta {
  right_arm: number;
  left_arm: number;
  right_leg: number;
  left_leg: number;
}

export interface Outcome {
  winner: "PLAYER" | "AI" | "DRAW";
  hp_diff: number;
  end_frame: number;
}

export interface FrameBatch {
  frames: FrameView[];
  bal: number;
  momenta: Momenta;
  pdr?: number;
  outcome?: Outcome;
}

export interface RosterEntry {
  id: string;
  kind: string;
  damage: number;
  reach: number;
  motion_id: string;
}

export interface SessionSnapshot {
  id: string;
  phase: "AWAITING_INPUT" | "ADVANCING" | "FINISHED";
  frame: number;
  player: CharView;
  ai: CharView;
  bal: number;
  momenta: Momenta;
  pdr?: number;
  outcome?: Outcome;
  roster?: RosterEntry[];
}
