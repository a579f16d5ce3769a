// Keyboard to protocol actions: arrows maneuver, space drops.
// 3D drops are directional, so shift+arrow selects the drop side first.

export type DropSide = "left" | "right" | "front" | "rear";

export type KeyResult =
  | { kind: "action"; action: string }
  | { kind: "select"; side: DropSide }
  | null;

const ARROW_SIDE: Record<string, DropSide> = {
  ArrowLeft: "left",
  ArrowRight: "right",
  ArrowUp: "front",
  ArrowDown: "rear",
};

const MOVE_2D: Record<string, string> = {
  ArrowLeft: "move_left",
  ArrowRight: "move_right",
  ArrowUp: "move_up",
  ArrowDown: "move_down",
};

const MOVE_3D: Record<string, string> = {
  ArrowLeft: "move_left",
  ArrowRight: "move_right",
  ArrowUp: "move_forward",
  ArrowDown: "move_backward",
};

export function keyToAction(
  key: string,
  shift: boolean,
  dim: number,
  side: DropSide,
): KeyResult {
  if (key === " " || key === "Space" || key === "Spacebar") {
    return { kind: "action", action: dim === 3 ? `drop_${side}` : "drop" };
  }
  if (!(key in ARROW_SIDE)) {
    return null; // unmapped keys are ignored
  }
  if (dim === 3 && shift) {
    return { kind: "select", side: ARROW_SIDE[key] };
  }
  if (dim === 1) {
    const move = { ArrowLeft: "move_left", ArrowRight: "move_right" }[key];
    return move ? { kind: "action", action: move } : null;
  }
  const table = dim === 3 ? MOVE_3D : MOVE_2D;
  return { kind: "action", action: table[key] };
}
