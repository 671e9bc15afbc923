// DOM layer: renders a Conversation model and wires user affordances.
//
// Approve/deny controls exist exactly while a confirmation is pending;
// clarification buttons exist exactly while options are pending; the
// input is disabled while a stream is in flight.

import type { ClarificationOption, Conversation, ToolStep } from "./events.js";
import { escapeHtml, renderMarkdown } from "./markdown.js";

export interface UiHandlers {
  onSend: (text: string) => void;
  onClarify: (agent: string) => void;
  onConfirm: (confirmationId: string, approved: boolean) => void;
}

export function renderApp(root: HTMLElement, conv: Conversation, handlers: UiHandlers): void {
  root.innerHTML = `
    <div class="chat">
      <header>
        <h1>wattson</h1>
        <span class="session">${conv.sessionId ? `session ${escapeHtml(conv.sessionId.slice(0, 8))}…` : "no session"}</span>
      </header>
      ${conv.banner ? `<div class="banner" role="alert">${escapeHtml(conv.banner)}</div>` : ""}
      <main class="messages"></main>
      <footer>
        <form class="composer">
          <input type="text" name="message" placeholder="Ask about your energy use…"
                 autocomplete="off" ${conv.streaming ? "disabled" : ""} />
          <button type="submit" ${conv.streaming ? "disabled" : ""}>Send</button>
        </form>
      </footer>
    </div>`;

  const messages = root.querySelector("main.messages") as HTMLElement;
  for (const message of conv.messages) {
    messages.appendChild(renderMessage(message.role, message.content, message.steps, message.error));
  }
  if (conv.streaming || conv.draft || conv.draftSteps.length > 0) {
    const live = renderMessage("assistant", conv.draft, conv.draftSteps, false);
    live.classList.add("streaming");
    messages.appendChild(live);
  }
  if (conv.clarification !== null) {
    messages.appendChild(renderClarification(conv.clarification, handlers));
  }
  for (const pending of conv.confirmations) {
    messages.appendChild(renderConfirmation(pending.confirmationId, pending.summary, handlers));
  }

  const form = root.querySelector("form.composer") as HTMLFormElement;
  form.addEventListener("submit", (submitEvent) => {
    submitEvent.preventDefault();
    const input = form.querySelector("input[name=message]") as HTMLInputElement;
    const text = input.value.trim();
    if (text && !conv.streaming) {
      input.value = "";
      handlers.onSend(text);
    }
  });
}

function renderMessage(
  role: "user" | "assistant",
  content: string,
  steps: ToolStep[],
  isError: boolean,
): HTMLElement {
  const item = document.createElement("article");
  item.className = `message ${role}${isError ? " error" : ""}`;
  if (steps.length > 0) {
    const details = document.createElement("details");
    details.className = "tools";
    const summary = document.createElement("summary");
    summary.textContent = `${steps.length} tool ${steps.length === 1 ? "call" : "calls"}`;
    details.appendChild(summary);
    for (const step of steps) {
      const row = document.createElement("div");
      row.className = `tool-step${step.isError ? " tool-error" : ""}`;
      const args = step.arguments === undefined ? "" : JSON.stringify(step.arguments);
      const result =
        step.result === undefined ? "…" : JSON.stringify(step.result).slice(0, 400);
      row.textContent = `${step.tool}(${args}) -> ${result}`;
      details.appendChild(row);
    }
    item.appendChild(details);
  }
  const body = document.createElement("div");
  body.className = "body";
  body.innerHTML = renderMarkdown(content);
  item.appendChild(body);
  return item;
}

function renderClarification(options: ClarificationOption[], handlers: UiHandlers): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "clarification";
  for (const option of options) {
    const button = document.createElement("button");
    button.type = "button";
    button.dataset["agent"] = option.agent;
    button.textContent = `${option.agent} - ${option.description}`;
    button.addEventListener("click", () => handlers.onClarify(option.agent));
    wrap.appendChild(button);
  }
  return wrap;
}

function renderConfirmation(
  confirmationId: string,
  summary: string,
  handlers: UiHandlers,
): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "confirmation";
  wrap.dataset["confirmationId"] = confirmationId;
  const label = document.createElement("p");
  label.textContent = `Confirm: ${summary}`;
  wrap.appendChild(label);
  const approve = document.createElement("button");
  approve.type = "button";
  approve.className = "approve";
  approve.textContent = "Approve";
  approve.addEventListener("click", () => handlers.onConfirm(confirmationId, true));
  const deny = document.createElement("button");
  deny.type = "button";
  deny.className = "deny";
  deny.textContent = "Deny";
  deny.addEventListener("click", () => handlers.onConfirm(confirmationId, false));
  wrap.appendChild(approve);
  wrap.appendChild(deny);
  return wrap;
}
