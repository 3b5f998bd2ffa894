// Spawns the real analytics backend for the UI tests and waits for it to
// answer health checks. Each test file gets its own server on an ephemeral
// port, so files can run in parallel.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface TestServer {
  base: string;
  stop(): void;
}

export async function startServer(): Promise<TestServer> {
  const dataDir = mkdtempSync(join(tmpdir(), "gazekit-ui-"));
  const proc: ChildProcess = spawn("gazekit", ["serve", "--port", "0", "--data-dir", dataDir], {
    stdio: ["ignore", "pipe", "pipe"],
  });

  const base = await new Promise<string>((resolve, reject) => {
    let output = "";
    const timer = setTimeout(() => {
      proc.kill();
      reject(new Error(`server did not announce a port, output so far:\n${output}`));
    }, 30000);
    proc.stdout!.on("data", (chunk) => {
      output += String(chunk);
      const m = output.match(/listening on (http:\/\/[\d.]+:\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve(m[1]!);
      }
    });
    proc.stderr!.on("data", (chunk) => {
      output += String(chunk);
    });
    proc.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited with ${code}:\n${output}`));
    });
  });

  for (let i = 0; i < 100; i++) {
    try {
      const resp = await fetch(`${base}/api/health`);
      if (resp.ok) break;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 100));
  }

  return { base, stop: () => proc.kill() };
}
