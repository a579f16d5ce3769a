// Websocket wiring with one-in-flight action debouncing.

import { ClientMessage, Mode, ServerMessage, TaskDescriptor } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: string, handler: (event: any) => void): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface PlayClientOptions {
  url: string;
  onMessage: (msg: ServerMessage) => void;
  onClose?: () => void;
  socketFactory?: SocketFactory;
}

export class PlayClient {
  private socket: SocketLike | null = null;
  private awaitingReply = false;

  constructor(private readonly opts: PlayClientOptions) {}

  connect(): Promise<void> {
    const factory =
      this.opts.socketFactory ?? ((url: string) => new WebSocket(url) as unknown as SocketLike);
    const socket = factory(this.opts.url);
    this.socket = socket;
    socket.addEventListener("message", (event: MessageEvent) => {
      this.awaitingReply = false;
      this.opts.onMessage(JSON.parse(String(event.data)) as ServerMessage);
    });
    socket.addEventListener("close", () => {
      this.socket = null;
      this.opts.onClose?.();
    });
    return new Promise((resolve, reject) => {
      socket.addEventListener("open", () => resolve());
      socket.addEventListener("error", (event: any) => reject(event));
    });
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  private send(msg: ClientMessage): void {
    if (!this.socket) {
      throw new Error("not connected");
    }
    this.socket.send(JSON.stringify(msg));
  }

  create(task: TaskDescriptor, mode: Mode, seed?: number): void {
    this.awaitingReply = true;
    this.send(seed === undefined ? { type: "create", task, mode } : { type: "create", task, mode, seed });
  }

  /** Sends unless a reply is still pending; returns whether it went out. */
  sendAction(action: string): boolean {
    if (!this.socket || this.awaitingReply) {
      return false;
    }
    this.awaitingReply = true;
    this.send({ type: "action", action });
    return true;
  }

  resign(): void {
    this.send({ type: "resign" });
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }
}
