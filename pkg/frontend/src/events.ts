// Stream event types and the pure conversation reducer.
//
// The reducer is the testable core: it consumes wire events in arrival
// order, enforces sequence monotonicity and single-termination, and
// updates a plain conversation model the DOM layer renders from.

export interface WireEvent {
  kind: string;
  seq: number;
  payload: Record<string, unknown>;
}

export interface ToolStep {
  tool: string;
  arguments?: unknown;
  result?: unknown;
  isError: boolean;
  resolved: boolean;
}

export interface ChatMessage {
  role: "user" | "assistant";
  content: string;
  steps: ToolStep[];
  error: boolean;
}

export interface ClarificationOption {
  agent: string;
  description: string;
}

export interface PendingConfirmation {
  confirmationId: string;
  summary: string;
  expiresAt: string;
}

export interface Conversation {
  sessionId: string | null;
  messages: ChatMessage[];
  streaming: boolean;
  draft: string;
  draftSteps: ToolStep[];
  routing: Record<string, unknown> | null;
  clarification: ClarificationOption[] | null;
  confirmations: PendingConfirmation[];
  banner: string | null;
  lastSeq: number;
  terminated: boolean;
  orderViolations: number;
}

export function newConversation(sessionId: string | null = null): Conversation {
  return {
    sessionId,
    messages: [],
    streaming: false,
    draft: "",
    draftSteps: [],
    routing: null,
    clarification: null,
    confirmations: [],
    banner: null,
    lastSeq: -1,
    terminated: false,
    orderViolations: 0,
  };
}

export function beginStream(conv: Conversation, userText: string | null): void {
  if (userText !== null) {
    conv.messages.push({ role: "user", content: userText, steps: [], error: false });
  }
  conv.streaming = true;
  conv.draft = "";
  conv.draftSteps = [];
  conv.banner = null;
  conv.lastSeq = -1;
  conv.terminated = false;
}

export function applyEvent(conv: Conversation, event: WireEvent): void {
  if (conv.terminated || event.seq <= conv.lastSeq) {
    // Out-of-order or post-terminal events are protocol violations; they
    // are counted and dropped rather than rendered out of order.
    conv.orderViolations += 1;
    return;
  }
  conv.lastSeq = event.seq;
  const payload = event.payload ?? {};
  switch (event.kind) {
    case "routing":
      conv.routing = payload;
      break;
    case "token":
      conv.draft += String(payload["text"] ?? "");
      break;
    case "tool_call":
      conv.draftSteps.push({
        tool: String(payload["tool"] ?? ""),
        arguments: payload["arguments"],
        isError: false,
        resolved: false,
      });
      break;
    case "tool_result": {
      const tool = String(payload["tool"] ?? "");
      const open = conv.draftSteps.find((s) => !s.resolved && s.tool === tool);
      const step = open ?? {
        tool,
        arguments: undefined,
        isError: false,
        resolved: false,
      };
      step.result = payload["content"];
      step.isError = Boolean(payload["is_error"]);
      step.resolved = true;
      if (!open) {
        conv.draftSteps.push(step);
      }
      const content = payload["content"];
      if (tool === "confirm_action" && content && typeof content === "object") {
        const resolvedId = (content as Record<string, unknown>)["confirmation_id"];
        conv.confirmations = conv.confirmations.filter(
          (c) => c.confirmationId !== resolvedId,
        );
      }
      break;
    }
    case "clarification": {
      const options = (payload["options"] as ClarificationOption[]) ?? [];
      conv.clarification = options.map((o) => ({
        agent: String(o.agent),
        description: String(o.description),
      }));
      conv.draft = String(payload["message"] ?? "");
      break;
    }
    case "confirmation_request":
      conv.confirmations.push({
        confirmationId: String(payload["confirmation_id"] ?? ""),
        summary: String(payload["summary"] ?? ""),
        expiresAt: String(payload["expires_at"] ?? ""),
      });
      break;
    case "error":
      conv.messages.push({
        role: "assistant",
        content: `Something went wrong: ${String(payload["reason"] ?? "unknown error")}`,
        steps: conv.draftSteps,
        error: true,
      });
      conv.draft = "";
      conv.draftSteps = [];
      conv.streaming = false;
      conv.terminated = true;
      break;
    case "done":
      conv.messages.push({
        role: "assistant",
        content: conv.draft,
        steps: conv.draftSteps,
        error: false,
      });
      conv.draft = "";
      conv.draftSteps = [];
      conv.streaming = false;
      conv.terminated = true;
      break;
    default:
      // Unknown kinds are ignored; forward compatibility.
      break;
  }
}

// History reconciliation: after a completed stream the rendered history
// must equal the server's. Returns true when contents match.
export function reconcile(
  conv: Conversation,
  serverMessages: { role: string; content: string; error?: boolean }[],
): boolean {
  const rendered = conv.messages.map((m) => `${m.role}:${m.content}`);
  const server = serverMessages
    .filter((m) => m.role === "user" || m.role === "assistant")
    .map((m) => `${m.role}:${m.content}`);
  if (rendered.length !== server.length) return false;
  return rendered.every((line, index) => line === server[index]);
}

export function restoreFromHistory(
  conv: Conversation,
  serverMessages: { role: string; content: string; error?: boolean }[],
): void {
  conv.messages = serverMessages
    .filter((m) => m.role === "user" || m.role === "assistant")
    .map((m) => ({
      role: m.role as "user" | "assistant",
      content: m.content,
      steps: [],
      error: Boolean(m.error),
    }));
}
