// Wire types for the play-service JSON protocol (/play websocket).

export type Mode = "training" | "evaluation";

export interface TaskDescriptor {
  id?: string;
  dim?: number;
  kind?: "static" | "dynamic";
  density?: string | null;
  group?: number;
  env?: Record<string, unknown>;
}

export interface DesignDoc {
  dim: number;
  W: number;
  H: number | null;
  tags: string[];
  group_id: number;
  target: number[];
}

export interface StateMessage {
  type: "state";
  session: string;
  dim: number;
  window: number[];
  window_shape: number[];
  n_steps: number;
  n_bricks: number;
  brick_budget: number;
  legal_actions: string[];
  done: boolean;
  design?: DesignDoc;
  pose?: number[];
  reward?: number;
  total_reward?: number;
  seed?: number;
}

export interface EpisodeEndMessage {
  type: "episode_end";
  session: string;
  iou: number;
  done_reason: string;
  n_steps: number;
  n_bricks: number;
  record_id: string | null;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  text: string;
}

export type ServerMessage = StateMessage | EpisodeEndMessage | ErrorMessage;

export type ClientMessage =
  | { type: "create"; task: TaskDescriptor; mode: Mode; seed?: number }
  | { type: "action"; action: string }
  | { type: "resign" };

// Window cell codes (everything >= 0 is a brick count).
export const OUTSIDE = -1;
export const LANDMARK = -2;
