// Thin fetch client for the session service. All methods throw ApiError on
// non-2xx responses so callers can surface the server's rule messages.

import type {
    BestView,
    HistoryEvent,
    NextQueryResponse,
    Outcome,
    ProblemBody,
    SessionConfig,
} from "./types.js";

export class ApiError extends Error {
    constructor(
        public readonly status: number,
        public readonly body: unknown,
    ) {
        super(`request failed with status ${status}`);
    }

    ruleName(): string | null {
        const detail = (this.body as { detail?: { error?: string } })?.detail;
        return detail && typeof detail === "object" && detail.error ? detail.error : null;
    }
}

export class SessionClient {
    constructor(public readonly baseUrl: string) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const response = await fetch(`${this.baseUrl}${path}`, {
            headers: { "content-type": "application/json" },
            ...init,
        });
        const text = await response.text();
        const body = text ? JSON.parse(text) : null;
        if (!response.ok) {
            throw new ApiError(response.status, body);
        }
        return body as T;
    }

    createSession(
        problem: ProblemBody,
        config: SessionConfig,
        extras?: { idempotency_key?: string; preview_url_template?: string },
    ): Promise<{ session_id: string }> {
        return this.request("/v1/sessions", {
            method: "POST",
            body: JSON.stringify({ problem, config, ...extras }),
        });
    }

    nextQuery(sessionId: string): Promise<NextQueryResponse> {
        return this.request(`/v1/sessions/${sessionId}/queries/next`);
    }

    submitFeedback(
        sessionId: string,
        queryId: string,
        outcomes: Outcome[],
    ): Promise<{ accepted: boolean; best_index: number }> {
        return this.request(`/v1/sessions/${sessionId}/queries/${queryId}/feedback`, {
            method: "POST",
            body: JSON.stringify({ outcomes }),
        });
    }

    getBest(sessionId: string): Promise<BestView> {
        return this.request(`/v1/sessions/${sessionId}/best`);
    }

    getHistory(sessionId: string): Promise<{ events: HistoryEvent[] }> {
        return this.request(`/v1/sessions/${sessionId}/history`);
    }
}
