// Session driver shared by the browser app and the scripted tests: polls
// for the next query, asks the decision maker for an answer, validates it
// client-side, submits, repeats until the sample budget is spent.

import { SessionClient } from "./api.js";
import { validateOutcomeSet } from "./rules.js";
import type { Outcome, QueryView } from "./types.js";

export class ClientValidationError extends Error {
    constructor(public readonly rule: string, message: string) {
        super(message);
    }
}

export interface FlowCallbacks {
    answer(query: QueryView): Promise<Outcome[]> | Outcome[];
    onProgress?(iteration: number, nMax: number): void;
    pollDelayMs?: number;
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export async function submitValidated(
    client: SessionClient,
    sessionId: string,
    queryId: string,
    outcomes: Outcome[],
): Promise<void> {
    const verdict = validateOutcomeSet(outcomes);
    if (!verdict.ok) {
        throw new ClientValidationError(verdict.rule, verdict.message);
    }
    await client.submitFeedback(sessionId, queryId, verdict.normalized);
}

export async function runSession(
    client: SessionClient,
    sessionId: string,
    callbacks: FlowCallbacks,
): Promise<number> {
    let answered = 0;
    for (;;) {
        const view = await client.nextQuery(sessionId);
        if ("done" in view) {
            return answered;
        }
        if ("propose_pending" in view) {
            await sleep(callbacks.pollDelayMs ?? 200);
            continue;
        }
        callbacks.onProgress?.(view.iteration, view.n_max);
        const outcomes = await callbacks.answer(view);
        await submitValidated(client, sessionId, view.query_id, outcomes);
        answered += 1;
    }
}
