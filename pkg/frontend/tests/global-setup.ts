// Boots the Python session service once for the whole test run.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const SERVER_URL = "http://127.0.0.1:8897";

let server: ChildProcess | null = null;

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export default async function setup(): Promise<() => void> {
    const dataDir = mkdtempSync(join(tmpdir(), "likertopt-ui-test-"));
    server = spawn(
        "python3",
        [
            "-m",
            "likertopt.cli",
            "serve",
            "--bind",
            "127.0.0.1:8897",
            "--data-dir",
            dataDir,
        ],
        { stdio: ["ignore", "inherit", "inherit"] },
    );
    const deadline = Date.now() + 30_000;
    for (;;) {
        try {
            const response = await fetch(`${SERVER_URL}/`);
            if (response.ok) {
                break;
            }
        } catch {
            // not up yet
        }
        if (Date.now() > deadline) {
            server.kill();
            throw new Error("session service did not come up within 30s");
        }
        await sleep(200);
    }
    return () => {
        server?.kill();
    };
}
