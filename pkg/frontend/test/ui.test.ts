// @vitest-environment happy-dom
import { describe, expect, it, vi } from "vitest";

import { applyEvent, beginStream, newConversation } from "../src/events.js";
import { renderApp, type UiHandlers } from "../src/ui.js";

function handlers(overrides: Partial<UiHandlers> = {}): UiHandlers {
  return {
    onSend: vi.fn(),
    onClarify: vi.fn(),
    onConfirm: vi.fn(),
    ...overrides,
  };
}

function mount(conv = newConversation("abcdef1234"), h = handlers()) {
  const root = document.createElement("div");
  document.body.appendChild(root);
  renderApp(root, conv, h);
  return { root, h };
}

describe("chat view", () => {
  it("renders one button per clarification option and routes on click", () => {
    const conv = newConversation("s");
    conv.clarification = [
      { agent: "analysis", description: "your data" },
      { agent: "knowledge", description: "concepts" },
    ];
    const h = handlers();
    const { root } = mount(conv, h);
    const buttons = root.querySelectorAll(".clarification button");
    expect(buttons.length).toBe(2);
    (buttons[1] as HTMLButtonElement).click();
    expect(h.onClarify).toHaveBeenCalledWith("knowledge");
  });

  it("shows approve/deny only while a confirmation is pending", () => {
    const conv = newConversation("s");
    const h = handlers();
    let { root } = mount(conv, h);
    expect(root.querySelector(".confirmation")).toBeNull();

    beginStream(conv, "set it");
    applyEvent(conv, {
      kind: "confirmation_request",
      seq: 0,
      payload: { confirmation_id: "cfm-1", summary: "set_temperature to 78", expires_at: "x" },
    });
    applyEvent(conv, { kind: "done", seq: 1, payload: { turn: 1, latency: 0 } });
    ({ root } = mount(conv, h));
    const approve = root.querySelector(".confirmation button.approve") as HTMLButtonElement;
    expect(approve).not.toBeNull();
    approve.click();
    expect(h.onConfirm).toHaveBeenCalledWith("cfm-1", true);

    // resolution removes the affordance
    beginStream(conv, null);
    applyEvent(conv, {
      kind: "tool_result",
      seq: 0,
      payload: {
        tool: "confirm_action",
        content: { status: "executed", confirmation_id: "cfm-1" },
        is_error: false,
      },
    });
    applyEvent(conv, { kind: "done", seq: 1, payload: { turn: 2, latency: 0 } });
    ({ root } = mount(conv, h));
    expect(root.querySelector(".confirmation")).toBeNull();
  });

  it("deny button reports approved=false", () => {
    const conv = newConversation("s");
    conv.confirmations.push({ confirmationId: "cfm-9", summary: "mode change", expiresAt: "x" });
    const h = handlers();
    const { root } = mount(conv, h);
    (root.querySelector(".confirmation button.deny") as HTMLButtonElement).click();
    expect(h.onConfirm).toHaveBeenCalledWith("cfm-9", false);
  });

  it("disables input while streaming", () => {
    const conv = newConversation("s");
    beginStream(conv, "hello");
    const { root } = mount(conv);
    const input = root.querySelector("input[name=message]") as HTMLInputElement;
    const button = root.querySelector("form.composer button") as HTMLButtonElement;
    expect(input.disabled).toBe(true);
    expect(button.disabled).toBe(true);
  });

  it("submits trimmed input through onSend", () => {
    const conv = newConversation("s");
    const h = handlers();
    const { root } = mount(conv, h);
    const input = root.querySelector("input[name=message]") as HTMLInputElement;
    input.value = "  how much did I use?  ";
    (root.querySelector("form.composer") as HTMLFormElement).dispatchEvent(
      new Event("submit", { bubbles: true, cancelable: true }),
    );
    expect(h.onSend).toHaveBeenCalledWith("how much did I use?");
  });

  it("renders tool steps as collapsible details", () => {
    const conv = newConversation("s");
    beginStream(conv, "analyze");
    applyEvent(conv, {
      kind: "tool_call",
      seq: 0,
      payload: { tool: "analyze_appliances", arguments: {} },
    });
    applyEvent(conv, {
      kind: "tool_result",
      seq: 1,
      payload: { tool: "analyze_appliances", content: { ok: true }, is_error: false },
    });
    applyEvent(conv, { kind: "token", seq: 2, payload: { text: "done" } });
    applyEvent(conv, { kind: "done", seq: 3, payload: { turn: 1, latency: 0 } });
    const { root } = mount(conv);
    const details = root.querySelector("details.tools");
    expect(details).not.toBeNull();
    expect(details?.textContent).toContain("analyze_appliances");
  });
});
