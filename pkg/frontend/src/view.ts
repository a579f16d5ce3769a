// DOM rendering. Everything shown comes verbatim from server messages;
// the client never computes scores or reveals state the server withheld.

import {
  DesignDoc,
  EpisodeEndMessage,
  ErrorMessage,
  LANDMARK,
  OUTSIDE,
  StateMessage,
} from "./protocol.js";
import { DropSide } from "./keymap.js";

export interface ViewElements {
  windowGrid: HTMLElement;
  designGrid: HTMLElement;
  hud: HTMLElement;
  banner: HTMLElement;
  status: HTMLElement;
  legend: HTMLElement;
}

export function bindView(doc: Document, rootId = "app"): ViewElements {
  const root = doc.getElementById(rootId);
  if (!root) {
    throw new Error(`missing #${rootId} container`);
  }
  const pick = (id: string): HTMLElement => {
    const el = doc.getElementById(id);
    if (!el) {
      throw new Error(`missing #${id}`);
    }
    return el;
  };
  return {
    windowGrid: pick("window-grid"),
    designGrid: pick("design-grid"),
    hud: pick("hud"),
    banner: pick("banner"),
    status: pick("status"),
    legend: pick("legend"),
  };
}

function cellClass(value: number): string {
  if (value === OUTSIDE) {
    return "cell wall";
  }
  if (value === LANDMARK) {
    return "cell landmark";
  }
  if (value === 0) {
    return "cell empty";
  }
  return `cell brick b${Math.min(value, 6)}`;
}

function fillGrid(
  doc: Document,
  host: HTMLElement,
  values: number[],
  cols: number,
  centerIndex: number | null,
  labels = false,
): void {
  host.textContent = "";
  host.style.gridTemplateColumns = `repeat(${cols}, 1.6em)`;
  values.forEach((v, i) => {
    const cell = doc.createElement("div");
    cell.className = cellClass(v);
    if (i === centerIndex) {
      cell.classList.add("robot");
    }
    if (labels && v > 0) {
      cell.textContent = String(v);
    }
    host.appendChild(cell);
  });
}

/**
 * The server sends windows row-major over (x, y) with y growing downward;
 * the screen grid is laid out row by row, so transpose planar windows.
 */
function toScreenOrder(values: number[], shape: number[]): { cells: number[]; cols: number } {
  if (shape.length === 1) {
    return { cells: values, cols: shape[0] };
  }
  const [w, h] = shape;
  const out: number[] = [];
  for (let y = 0; y < h; y += 1) {
    for (let x = 0; x < w; x += 1) {
      out.push(values[x * h + y]);
    }
  }
  return { cells: out, cols: w };
}

export function renderState(doc: Document, view: ViewElements, msg: StateMessage): void {
  const { cells, cols } = toScreenOrder(msg.window, msg.window_shape);
  fillGrid(doc, view.windowGrid, cells, cols, Math.floor(cells.length / 2), msg.dim !== 2);

  const parts = [
    `steps ${msg.n_steps}`,
    `bricks ${msg.n_bricks} / ${msg.brick_budget}`,
  ];
  if (msg.reward !== undefined) {
    parts.push(`reward ${msg.reward}`);
  }
  if (msg.total_reward !== undefined) {
    parts.push(`total reward ${msg.total_reward}`);
  }
  view.hud.textContent = parts.join("  ·  ");
  view.banner.textContent = "";
  view.status.textContent = "";
  if (msg.design) {
    renderDesign(doc, view, msg.design);
  } else {
    view.designGrid.textContent = "";
  }
}

function renderDesign(doc: Document, view: ViewElements, design: DesignDoc): void {
  const shape = design.H === null ? [design.W] : [design.W, design.H];
  const { cells, cols } = toScreenOrder(design.target, shape);
  fillGrid(doc, view.designGrid, cells, cols, null, design.dim !== 2);
}

export function renderEnd(view: ViewElements, msg: EpisodeEndMessage): void {
  // shown exactly as received; the client does no scoring arithmetic
  view.banner.textContent = `episode over (${msg.done_reason}) — IoU ${msg.iou}`;
}

export function renderError(view: ViewElements, msg: ErrorMessage): void {
  view.status.textContent = `${msg.code}: ${msg.text}`;
}

export function renderLegend(view: ViewElements, dim: number, side: DropSide): void {
  if (dim === 3) {
    view.legend.textContent = `arrows move · shift+arrow picks drop side · space drops ${side}`;
  } else {
    view.legend.textContent = "arrows move · space drops";
  }
}

export function renderClosed(view: ViewElements): void {
  view.status.textContent = "connection closed — episode aborted";
}
