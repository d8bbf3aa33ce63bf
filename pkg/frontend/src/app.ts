// Browser front end: presents candidate pairs, captures a 5-point likert
// answer with a certainty level and an optional adjacent second answer,
// shows progress and the incumbent best. All state lives on the server;
// refreshing the page resumes the session.

import { ApiError, SessionClient } from "./api.js";
import { ClientValidationError, submitValidated } from "./flow.js";
import { validateOutcomeSet } from "./rules.js";
import type { Outcome, QueryView } from "./types.js";

const LIKERT_LABELS: Record<number, string> = {
    [-2]: "A much better than B",
    [-1]: "A slightly better than B",
    0: "A as good as B",
    1: "B slightly better than A",
    2: "B much better than A",
};

const CERTAINTY_LABELS: Record<number, string> = {
    1: "not so sure",
    2: "quite sure",
    3: "sure",
    4: "absolutely sure",
};

interface UiState {
    client: SessionClient;
    sessionId: string;
    query: QueryView | null;
    selection: { p: number | null; c: number | null; second: number | null };
    withSecond: boolean;
}

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    attrs: Record<string, string> = {},
    ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        node.setAttribute(key, value);
    }
    node.append(...children);
    return node;
}

function candidateTable(label: string, coords: number[], preview?: string): HTMLElement {
    const rows = coords.map((v, k) =>
        el("tr", {}, el("td", {}, `x${k + 1}`), el("td", {}, v.toPrecision(6))),
    );
    const parts: (Node | string)[] = [
        el("h3", {}, `Candidate ${label}`),
        el("table", { class: "coords" }, ...rows),
    ];
    if (preview) {
        parts.push(el("a", { href: preview, target: "_blank" }, "preview"));
    }
    return el("div", { class: "candidate" }, ...parts);
}

function adjacentOptions(p: number): number[] {
    return [p - 1, p + 1].filter((v) => v >= -2 && v <= 2 && (p === 0 || v * p >= 0));
}

export class App {
    private state: UiState;
    private root: HTMLElement;
    private banner: HTMLElement;

    constructor(root: HTMLElement, client: SessionClient, sessionId: string) {
        this.root = root;
        this.banner = el("div", { class: "banner hidden" });
        this.state = {
            client,
            sessionId,
            query: null,
            selection: { p: null, c: null, second: null },
            withSecond: false,
        };
    }

    async refresh(): Promise<void> {
        try {
            const view = await this.state.client.nextQuery(this.state.sessionId);
            this.banner.classList.add("hidden");
            if ("done" in view) {
                await this.renderDone();
                return;
            }
            if ("propose_pending" in view) {
                this.renderWaiting();
                setTimeout(() => void this.refresh(), 500);
                return;
            }
            this.state.query = view;
            this.state.selection = { p: null, c: null, second: null };
            this.state.withSecond = false;
            this.renderQuery(view);
        } catch (error) {
            this.showOffline(error);
            setTimeout(() => void this.refresh(), 2000);
        }
    }

    private showOffline(error: unknown): void {
        this.banner.textContent =
            error instanceof ApiError
                ? `server error (${error.status})`
                : "connection lost; retrying";
        this.banner.classList.remove("hidden");
    }

    private renderWaiting(): void {
        this.mount(el("p", { class: "waiting" }, "computing the next candidate…"));
    }

    private async renderDone(): Promise<void> {
        const best = await this.state.client.getBest(this.state.sessionId);
        this.mount(
            el("h2", {}, "Session complete"),
            el("p", {}, `Best candidate after ${best.iteration} samples:`),
            candidateTable("best", best.x),
        );
    }

    private renderQuery(view: QueryView): void {
        const error = el("p", { class: "error hidden" });
        const likert = el(
            "fieldset",
            { class: "likert" },
            el("legend", {}, "Which candidate do you prefer?"),
            ...[-2, -1, 0, 1, 2].map((p) =>
                el(
                    "label",
                    {},
                    Object.assign(el("input", { type: "radio", name: "likert" }), {
                        onchange: () => {
                            this.state.selection.p = p;
                            this.state.selection.second = null;
                            this.syncSecondChoices();
                        },
                    }),
                    LIKERT_LABELS[p],
                ),
            ),
        );
        const certainty = el(
            "fieldset",
            { class: "certainty" },
            el("legend", {}, "How sure are you?"),
            ...[1, 2, 3, 4].map((c) =>
                el(
                    "label",
                    {},
                    Object.assign(el("input", { type: "radio", name: "certainty" }), {
                        onchange: () => {
                            this.state.selection.c = c;
                            this.syncSecondChoices();
                        },
                    }),
                    CERTAINTY_LABELS[c],
                ),
            ),
        );
        const secondToggle = Object.assign(
            el("input", { type: "checkbox", id: "second-toggle" }),
            {
                onchange: (event: Event) => {
                    this.state.withSecond = (event.target as HTMLInputElement).checked;
                    this.syncSecondChoices();
                },
            },
        );
        const secondBox = el(
            "div",
            { class: "second" },
            el(
                "label",
                { for: "second-toggle" },
                secondToggle,
                "also consider an adjacent answer",
            ),
            el("div", { class: "second-choices" }),
        );
        const submit = Object.assign(el("button", {}, "Submit answer"), {
            onclick: async () => {
                const outcomes = this.collectOutcomes();
                try {
                    await submitValidated(
                        this.state.client,
                        this.state.sessionId,
                        view.query_id,
                        outcomes,
                    );
                    await this.refresh();
                } catch (failure) {
                    error.classList.remove("hidden");
                    if (failure instanceof ClientValidationError) {
                        error.textContent = failure.message;
                    } else if (failure instanceof ApiError) {
                        const detail = failure.ruleName();
                        error.textContent = detail
                            ? `rejected by the server: ${detail}`
                            : `server error (${failure.status})`;
                    } else {
                        this.showOffline(failure);
                    }
                }
            },
        });
        this.mount(
            el(
                "p",
                { class: "progress" },
                `sample ${view.iteration} of ${view.n_max} — comparison vs ` +
                    (view.purpose === "vs_best" ? "current best" : "previous sample"),
            ),
            el(
                "div",
                { class: "pair" },
                candidateTable("A", view.a, view.preview_a),
                candidateTable("B", view.b, view.preview_b),
            ),
            likert,
            certainty,
            secondBox,
            error,
            submit,
        );
        this.syncSecondChoices();
    }

    private syncSecondChoices(): void {
        const { p, c } = this.state.selection;
        const toggle = this.root.querySelector<HTMLInputElement>("#second-toggle");
        const host = this.root.querySelector<HTMLElement>(".second-choices");
        if (!toggle || !host) {
            return;
        }
        // an absolutely-sure answer must be the only one
        toggle.disabled = c === 4;
        if (c === 4) {
            toggle.checked = false;
            this.state.withSecond = false;
            this.state.selection.second = null;
        }
        host.replaceChildren();
        if (!this.state.withSecond || p === null) {
            return;
        }
        for (const option of adjacentOptions(p)) {
            host.append(
                el(
                    "label",
                    {},
                    Object.assign(el("input", { type: "radio", name: "second" }), {
                        checked: this.state.selection.second === option,
                        onchange: () => {
                            this.state.selection.second = option;
                        },
                    }),
                    LIKERT_LABELS[option],
                ),
            );
        }
    }

    private collectOutcomes(): Outcome[] {
        const { p, c, second } = this.state.selection;
        if (p === null || c === null) {
            return [];
        }
        const outcomes: Outcome[] = [{ p, c }];
        if (this.state.withSecond && second !== null) {
            outcomes.push({ p: second, c: Math.min(c, 3) });
        }
        return outcomes;
    }

    private mount(...children: (Node | string)[]): void {
        this.root.replaceChildren(this.banner, ...children);
    }
}

export async function bootstrap(): Promise<void> {
    const root = document.getElementById("app");
    if (!root) {
        return;
    }
    const params = new URLSearchParams(window.location.search);
    const base = params.get("server") ?? "http://127.0.0.1:8642";
    const client = new SessionClient(base);
    let sessionId = params.get("session");
    if (!sessionId) {
        const created = await client.createSession(
            { n: 2, lower: [-2, -1], upper: [2, 1] },
            { mode: "ampl", n_init: 6, n_max: 20 },
        );
        sessionId = created.session_id;
        params.set("session", sessionId);
        window.history.replaceState(null, "", `?${params.toString()}`);
    }
    const app = new App(root, client, sessionId);
    await app.refresh();
}

if (typeof document !== "undefined") {
    void bootstrap();
}

export { validateOutcomeSet };
