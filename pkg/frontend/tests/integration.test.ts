// Against the real Python bridge over the wire: page resync, typed input,
// and byte-exact back-channel delivery. Skips when the bridge binary is not
// on PATH (the rest of the suite runs against the protocol test double).

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import net, { AddressInfo } from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { BridgeClient } from "../src/client.js";
import { TabletViewModel } from "../src/viewmodel.js";
import { waitFor } from "./mockbridge.js";

const hasBridge = spawnSync("which", ["bridge"]).status === 0;
const maybe = hasBridge ? describe : describe.skip;

maybe("against the real bridge server", () => {
  let proc: ChildProcess;
  let base: string;

  beforeAll(async () => {
    proc = spawn("bridge", ["--listen", "127.0.0.1:0"], { stdio: ["ignore", "pipe", "pipe"] });
    base = await new Promise<string>((resolve, reject) => {
      let out = "";
      const timer = setTimeout(() => reject(new Error(`bridge never came up: ${out}`)), 10000);
      proc.stdout!.on("data", (chunk: Buffer) => {
        out += chunk.toString();
        const m = out.match(/listening on ([\d.]+):(\d+)/);
        if (m) {
          clearTimeout(timer);
          resolve(`http://${m[1]}:${m[2]}`);
        }
      });
    });
  }, 15000);

  afterAll(() => {
    proc.kill();
  });

  it("starts blank and serves the page", async () => {
    const client = new BridgeClient(base);
    expect((await client.getPage()).mode).toBe("blank");
  });

  it("delivers typed input over the TCP back-channel byte-exactly", async () => {
    const lines: Buffer[] = [];
    const listener = net.createServer((conn) => {
      const chunks: Buffer[] = [];
      conn.on("data", (c) => chunks.push(c));
      conn.on("end", () => lines.push(Buffer.concat(chunks)));
    });
    await new Promise<void>((resolve) => listener.listen(0, "127.0.0.1", resolve));
    const port = (listener.address() as AddressInfo).port;

    const register = await fetch(`${base}/backchannel`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ port }),
    });
    expect(register.ok).toBe(true);

    const vm = new TabletViewModel(new BridgeClient(base));
    vm.setDraft("Zoë");
    expect(await vm.submit()).toBe(true);

    await waitFor(() => lines.length === 1, 5000);
    const message = JSON.parse(lines[0].toString("utf-8"));
    expect(message.type).toBe("text_input");
    expect(message.value).toBe("Zoë");
    expect(lines[0].includes(Buffer.from("Zoë", "utf-8"))).toBe(true);
    await new Promise<void>((resolve) => listener.close(() => resolve()));
  });
});
