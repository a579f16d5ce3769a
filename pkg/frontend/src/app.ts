// Application wiring: session lifecycle, keyboard input, rendering.

import { PlayClient, SocketFactory } from "./client.js";
import { DropSide, keyToAction } from "./keymap.js";
import { Mode, ServerMessage, TaskDescriptor } from "./protocol.js";
import {
  ViewElements,
  bindView,
  renderClosed,
  renderEnd,
  renderError,
  renderLegend,
  renderState,
} from "./view.js";

export interface AppOptions {
  serviceUrl?: string; // ws endpoint; defaults to the serving host
  socketFactory?: SocketFactory;
}

export class PlayApp {
  readonly view: ViewElements;
  client: PlayClient | null = null;
  dim = 2;
  dropSide: DropSide = "left";
  episodeOver = true;
  lastEnd: { iou: number; record_id: string | null } | null = null;

  constructor(
    private readonly doc: Document,
    private readonly opts: AppOptions = {},
  ) {
    this.view = bindView(doc);
    doc.addEventListener("keydown", (event: KeyboardEvent) => this.onKey(event));
  }

  private serviceUrl(): string {
    if (this.opts.serviceUrl) {
      return this.opts.serviceUrl;
    }
    const loc = this.doc.defaultView!.location;
    const scheme = loc.protocol === "https:" ? "wss" : "ws";
    return `${scheme}://${loc.host}/play`;
  }

  async start(task: TaskDescriptor, mode: Mode, seed?: number): Promise<void> {
    this.client?.close();
    this.client = new PlayClient({
      url: this.serviceUrl(),
      onMessage: (msg) => this.onMessage(msg),
      onClose: () => renderClosed(this.view),
      socketFactory: this.opts.socketFactory,
    });
    await this.client.connect();
    this.dim = task.dim ?? 2;
    this.episodeOver = false;
    this.lastEnd = null;
    renderLegend(this.view, this.dim, this.dropSide);
    this.client.create(task, mode, seed);
  }

  resign(): void {
    if (this.client && !this.episodeOver) {
      this.client.resign();
    }
  }

  onMessage(msg: ServerMessage): void {
    if (msg.type === "state") {
      this.dim = msg.dim;
      renderState(this.doc, this.view, msg);
    } else if (msg.type === "episode_end") {
      this.episodeOver = true;
      this.lastEnd = { iou: msg.iou, record_id: msg.record_id };
      renderEnd(this.view, msg);
    } else {
      renderError(this.view, msg);
    }
  }

  onKey(event: KeyboardEvent): void {
    if (!this.client || this.episodeOver || event.repeat) {
      return; // input between episodes is ignored
    }
    const result = keyToAction(event.key, event.shiftKey, this.dim, this.dropSide);
    if (!result) {
      return;
    }
    event.preventDefault?.();
    if (result.kind === "select") {
      this.dropSide = result.side;
      renderLegend(this.view, this.dim, this.dropSide);
      return;
    }
    this.client.sendAction(result.action);
  }
}

export async function fetchTasks(baseUrl: string): Promise<TaskDescriptor[]> {
  const resp = await fetch(`${baseUrl}/tasks`);
  if (!resp.ok) {
    throw new Error(`task catalog unavailable: ${resp.status}`);
  }
  return (await resp.json()) as TaskDescriptor[];
}
