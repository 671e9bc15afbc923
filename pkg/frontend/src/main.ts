// App bootstrap: session restore, stream driving, reconnect-from-history.

import { ApiClient } from "./api.js";
import {
  applyEvent,
  beginStream,
  newConversation,
  reconcile,
  restoreFromHistory,
  type Conversation,
} from "./events.js";
import { renderApp, type UiHandlers } from "./ui.js";

const SESSION_KEY = "wattson.session_id";

export class App {
  readonly conversation: Conversation;
  private readonly api: ApiClient;
  private readonly root: HTMLElement;

  constructor(root: HTMLElement, baseUrl = "") {
    this.root = root;
    this.api = new ApiClient(baseUrl);
    this.conversation = newConversation();
  }

  async start(): Promise<void> {
    const stored = localStorage.getItem(SESSION_KEY);
    try {
      if (stored) {
        try {
          const history = await this.api.getHistory(stored);
          this.conversation.sessionId = stored;
          restoreFromHistory(this.conversation, history.messages);
        } catch {
          localStorage.removeItem(SESSION_KEY);
        }
      }
      if (this.conversation.sessionId === null) {
        const sessionId = await this.api.createSession();
        this.conversation.sessionId = sessionId;
        localStorage.setItem(SESSION_KEY, sessionId);
      }
    } catch (error) {
      this.conversation.banner = `Cannot reach the server: ${String(error)}`;
    }
    this.render();
  }

  private handlers(): UiHandlers {
    return {
      onSend: (text) => void this.send(text),
      onClarify: (agent) => {
        this.conversation.clarification = null;
        void this.send(agent);
      },
      onConfirm: (confirmationId, approved) => void this.confirm(confirmationId, approved),
    };
  }

  private render(): void {
    renderApp(this.root, this.conversation, this.handlers());
    const pane = this.root.querySelector("main.messages");
    if (pane) pane.scrollTop = pane.scrollHeight;
  }

  async send(text: string): Promise<void> {
    const conv = this.conversation;
    if (conv.sessionId === null || conv.streaming) return;
    conv.clarification = null;
    beginStream(conv, text);
    this.render();
    try {
      for await (const event of this.api.streamMessage(conv.sessionId, text)) {
        applyEvent(conv, event);
        this.render();
      }
      if (!conv.terminated) {
        // Stream dropped mid-flight: recover the authoritative state.
        await this.recoverFromHistory();
      }
    } catch (error) {
      conv.streaming = false;
      conv.banner = `Stream failed: ${String(error)}`;
      await this.recoverFromHistory();
    }
    this.render();
  }

  async confirm(confirmationId: string, approved: boolean): Promise<void> {
    const conv = this.conversation;
    if (conv.sessionId === null || conv.streaming) return;
    beginStream(conv, null);
    this.render();
    try {
      for await (const event of this.api.streamConfirmation(
        conv.sessionId,
        confirmationId,
        approved,
      )) {
        applyEvent(conv, event);
        this.render();
      }
    } catch (error) {
      conv.streaming = false;
      conv.banner = `Confirmation failed: ${String(error)}`;
    }
    this.render();
  }

  private async recoverFromHistory(): Promise<void> {
    const conv = this.conversation;
    if (conv.sessionId === null) return;
    try {
      const history = await this.api.getHistory(conv.sessionId);
      if (!reconcile(conv, history.messages)) {
        restoreFromHistory(conv, history.messages);
      }
      conv.streaming = false;
    } catch {
      conv.banner = "Lost the server connection; retry when it is back.";
      conv.streaming = false;
    }
  }
}

declare const process: unknown;

if (typeof document !== "undefined" && typeof process === "undefined") {
  const root = document.getElementById("app");
  if (root) {
    const app = new App(root);
    void app.start();
  }
}
