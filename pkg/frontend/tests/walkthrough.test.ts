// @vitest-environment jsdom
//
// End-to-end scripted walkthrough against the real gateway: three
// choose -> listen -> report loops, the kiosk scan, the interview
// transcript, the postcard view, and a donated consent.  The server is
// spawned as a subprocess with a throwaway store.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api.js";
import { App } from "../src/app.js";
import { canChooseEmotion, canScan } from "../src/state.js";

let server: ChildProcess | null = null;
let base = "";
let storeDir = "";

async function waitForServer(url: string, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(url);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error(`gateway did not come up at ${url}`);
}

beforeAll(async () => {
  storeDir = mkdtempSync(join(tmpdir(), "emotrail-ui-"));
  const port = 18_000 + Math.floor(Math.random() * 1000);
  base = `http://127.0.0.1:${port}`;
  server = spawn(
    "python3",
    ["-m", "emotrail.cli", "serve", "--store", storeDir,
     "--bind", `127.0.0.1:${port}`],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  await waitForServer(`${base}/catalog`);
});

afterAll(() => {
  server?.kill("SIGTERM");
});

function click(selector: string): void {
  const element = document.querySelector<HTMLButtonElement>(selector);
  if (!element) throw new Error(`no element ${selector}`);
  if (element.disabled) throw new Error(`${selector} is disabled`);
  element.click();
}

function setValue(selector: string, value: string): void {
  const element = document.querySelector<HTMLInputElement | HTMLTextAreaElement>(selector);
  if (!element) throw new Error(`no element ${selector}`);
  element.value = value;
}

async function until(predicate: () => boolean, what: string,
                     timeoutMs = 10_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((resolve) => setTimeout(resolve, 10));
  }
  throw new Error(`timed out waiting for ${what}`);
}

function currentView(): string {
  return document.querySelector(".screen")?.getAttribute("data-view") ?? "";
}

function assertGridMirrorsServer(app: App): void {
  const view = app.session!;
  for (const tile of document.querySelectorAll<HTMLButtonElement>(".emotion-tile")) {
    const emotion = tile.dataset.emotion!;
    expect(!tile.disabled).toBe(canChooseEmotion(view, emotion));
  }
  const toDesk = document.querySelector<HTMLButtonElement>("#to-desk");
  expect(toDesk !== null).toBe(canScan(view));
}

describe("visitor walkthrough", () => {
  it("runs choose/listen/report x3, interview, postcard, and donation", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const client = new GatewayClient(base);
    const app = new App(document.getElementById("app")!, client, { msPerSecond: 1 });
    await app.start();

    expect(currentView()).toBe("start");
    click("#begin");
    await until(() => currentView() === "grid", "session start");
    const sessionId = app.session!.session_id;
    expect(app.session!.phase).toBe("Registered");
    assertGridMirrorsServer(app);

    const visits: Array<{ emotion: string; valence?: string; arousal?: string;
                          text?: string }> = [
      { emotion: "love", valence: "20", arousal: "90", text: "pulled under" },
      { emotion: "fear" },  // untouched: rest position (50,50,50) submits
      { emotion: "sadness", valence: "70", arousal: "30", text: "an old room" },
    ];
    for (const visit of visits) {
      click(`.emotion-tile[data-emotion="${visit.emotion}"]`);
      await until(() => currentView() === "painting", `painting for ${visit.emotion}`);
      expect(document.querySelector("#painting-title")!.textContent).toBeTruthy();
      expect(document.querySelector("#locate-instruction")).toBeTruthy();

      click("#play-script");
      await until(() => currentView() === "playback", "playback start");
      // the skip control unlocks only at the question segment
      await until(
        () => !document.querySelector<HTMLButtonElement>("#finish-script")!.disabled,
        "question segment",
      );
      expect(document.querySelector("#segment-label")!.textContent).toBe("question");
      click("#finish-script");
      await until(() => currentView() === "report", "report form");
      expect(app.session!.touring_sub).toBe("Reporting");

      if (visit.valence) setValue("#valence", visit.valence);
      if (visit.arousal) setValue("#arousal", visit.arousal);
      if (visit.text) setValue("#free-text", visit.text);
      click("#submit-report");
      await until(() => currentView() === "grid", "back at the grid");
      expect(app.session!.emotions_used).toContain(visit.emotion);
      assertGridMirrorsServer(app);
    }
    expect(app.session!.report_count).toBe(3);

    // over-long free text is stopped inline, before any request
    click('.emotion-tile[data-emotion="passion"]');
    await until(() => currentView() === "painting", "painting for passion");
    click("#play-script");
    await until(
      () => currentView() === "playback"
        && !document.querySelector<HTMLButtonElement>("#finish-script")!.disabled,
      "question segment (passion)",
    );
    click("#finish-script");
    await until(() => currentView() === "report", "report form (passion)");
    const requestsBefore = client.rejections.length;
    setValue("#free-text", "x".repeat(281));
    click("#submit-report");
    await until(
      () => document.querySelector("#inline-error")?.textContent?.includes("TextTooLong")
        ?? false,
      "inline TextTooLong",
    );
    expect(currentView()).toBe("report");
    expect(client.rejections.length).toBe(requestsBefore);
    setValue("#free-text", "a steady warmth");
    click("#submit-report");
    await until(() => currentView() === "grid", "back at the grid (passion)");
    expect(app.session!.report_count).toBe(4);

    click("#to-desk");
    await until(() => currentView() === "kiosk", "kiosk view");
    expect((document.querySelector("#token-input") as HTMLInputElement).value)
      .toBe(app.session!.code);
    click("#scan-card");
    await until(() => currentView() === "call", "interview call");

    // strongest report was love (arousal 90), valence 20 -> negative vampire
    expect(app.session!.video!.painting_id).toBe("vampire");
    expect(app.session!.video!.polarity).toBe("negative");
    const transcript = document.querySelector("#video-transcript")!.textContent!;
    expect(transcript).toBe(app.session!.video!.transcript);
    expect(transcript.length).toBeGreaterThan(0);

    click("#end-call");
    await until(
      () => !document.querySelector<HTMLButtonElement>("#print-postcard")!.hidden,
      "wrap-up controls",
    );
    expect(app.session!.interview_ended).toBe(true);
    click("#print-postcard");
    await until(() => currentView() === "postcard", "postcard view");
    const svgHost = document.querySelector("#postcard-svg")!;
    expect(svgHost.querySelector("svg")).toBeTruthy();
    expect(svgHost.innerHTML).toContain("report-dot");
    expect(app.session!.phase).toBe("PostcardIssued");

    click("#consent-donate");
    await until(() => currentView() === "done", "farewell");
    expect(document.querySelector("#farewell")!.textContent).toContain("donating");

    // the server agrees the trajectory is complete and donated
    const final = await client.session(sessionId);
    expect(final.phase).toBe("ConsentResolved");
    expect(final.consent).toBe("Donated");

    // the UI never issued a request the server rejected
    expect(client.rejections).toEqual([]);

    // untouched sliders went out as the rest position (50, 50, 50)
    const logDir = join(storeDir, "sessions");
    const logFile = readdirSync(logDir).find((name) => name.startsWith(sessionId));
    expect(logFile).toBeTruthy();
    const reports = readFileSync(join(logDir, logFile!), "utf-8")
      .trim().split("\n").map((line) => JSON.parse(line))
      .filter((record) => record.kind === "SelfReportSubmitted");
    const fearReport = reports.find((r) => r.payload.emotion_id === "fear");
    expect(fearReport.payload.valence).toBe(50);
    expect(fearReport.payload.arousal).toBe(50);
    expect(fearReport.payload.control).toBe(50);
    expect(fearReport.payload.free_text).toBe("");
  });
});
