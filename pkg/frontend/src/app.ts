// The single-page visitor companion.  Mobile-first, no framework: each
// server acknowledgment replaces the session view and triggers a full
// re-render of the current screen.

import {
  ApiError,
  type CatalogView,
  type EmotionEntry,
  GatewayClient,
  type SessionView,
} from "./api.js";
import { ScriptPlayback, type Scheduler, segmentsOf } from "./playback.js";
import {
  allEmotionsUsed,
  canChooseEmotion,
  canEndCall,
  canPlayScript,
  canPrintPostcard,
  canRecordConsent,
  canScan,
  canSubmitReport,
  validateFreeText,
} from "./state.js";

export type ViewName =
  | "start"
  | "grid"
  | "painting"
  | "playback"
  | "report"
  | "kiosk"
  | "call"
  | "postcard"
  | "done";

export interface AppOptions {
  /** Milliseconds per scripted second; 1000 for real pacing. */
  msPerSecond?: number;
  scheduler?: Scheduler;
}

const defaultScheduler: Scheduler = (fn, delayMs) => {
  setTimeout(fn, delayMs);
};

function el(html: string): HTMLElement {
  const template = document.createElement("template");
  template.innerHTML = html.trim();
  return template.content.firstElementChild as HTMLElement;
}

export class App {
  view: ViewName = "start";
  session: SessionView | null = null;
  catalog: CatalogView | null = null;

  private playback: ScriptPlayback | null = null;
  private playbackSegment = "";
  private playbackText = "";
  private playbackSkippable = false;
  private postcardSvg = "";
  private decision: "Donated" | "Withheld" | null = null;
  private banner = "";
  private inlineError = "";
  private readonly scheduler: Scheduler;
  private readonly msPerSecond: number;

  constructor(
    private readonly root: HTMLElement,
    readonly client: GatewayClient,
    options: AppOptions = {},
  ) {
    this.scheduler = options.scheduler ?? defaultScheduler;
    this.msPerSecond = options.msPerSecond ?? 1000;
  }

  async start(): Promise<void> {
    this.catalog = await this.client.catalog();
    this.render();
  }

  entryFor(emotionId: string): EmotionEntry {
    const entry = this.catalog?.emotions.find((e) => e.id === emotionId);
    if (!entry) throw new Error(`emotion ${emotionId} not in catalog`);
    return entry;
  }

  private async guard(action: () => Promise<void>): Promise<void> {
    this.banner = "";
    try {
      await action();
    } catch (error) {
      if (error instanceof ApiError) {
        this.banner = `${error.code}: ${error.message}`;
      } else {
        this.banner = String(error);
      }
    }
    this.render();
  }

  // -- actions ---------------------------------------------------------------

  async begin(): Promise<void> {
    await this.guard(async () => {
      this.session = await this.client.createSession();
      this.view = "grid";
    });
  }

  async choose(emotionId: string): Promise<void> {
    if (!this.session || !canChooseEmotion(this.session, emotionId)) return;
    await this.guard(async () => {
      this.session = await this.client.choose(this.session!.session_id, emotionId);
      this.view = "painting";
    });
  }

  playScript(): void {
    if (!this.session || !canPlayScript(this.session)) return;
    const entry = this.entryFor(this.session.current_emotion!);
    this.view = "playback";
    this.playback = new ScriptPlayback(
      segmentsOf(entry.script),
      (segment, skippable) => {
        this.playbackSegment = segment.name;
        this.playbackText = segment.text;
        this.playbackSkippable = skippable;
        this.render();
      },
      () => {
        void this.finishScript();
      },
      this.scheduler,
      this.msPerSecond,
    );
    this.playback.start();
    this.render();
  }

  skipToReport(): void {
    this.playback?.skip();
  }

  private async finishScript(): Promise<void> {
    if (!this.session) return;
    await this.guard(async () => {
      this.session = await this.client.scriptPlayed(this.session!.session_id);
      this.playback = null;
      this.view = "report";
    });
  }

  async submitReport(): Promise<void> {
    if (!this.session || !canSubmitReport(this.session)) return;
    const valence = Number((this.root.querySelector("#valence") as HTMLInputElement).value);
    const arousal = Number((this.root.querySelector("#arousal") as HTMLInputElement).value);
    const control = Number((this.root.querySelector("#control") as HTMLInputElement).value);
    const text = (this.root.querySelector("#free-text") as HTMLTextAreaElement).value;
    const problem = validateFreeText(text);
    if (problem) {
      this.inlineError = problem;
      this.render();
      return;
    }
    this.inlineError = "";
    await this.guard(async () => {
      this.session = await this.client.report(this.session!.session_id, {
        emotion_id: this.session!.current_emotion!,
        valence,
        arousal,
        control,
        free_text: text,
      });
      this.view = "grid";
    });
  }

  goToKiosk(): void {
    if (!this.session || !canScan(this.session)) return;
    this.view = "kiosk";
    this.render();
  }

  async scanCard(): Promise<void> {
    const token = (this.root.querySelector("#token-input") as HTMLInputElement).value.trim();
    if (!token) return;
    await this.guard(async () => {
      this.session = await this.client.scan(token);
      this.view = "call";
    });
  }

  async endCall(): Promise<void> {
    if (!this.session || !canEndCall(this.session)) return;
    await this.guard(async () => {
      this.session = await this.client.interviewEnded(this.session!.session_id);
    });
  }

  async printPostcard(): Promise<void> {
    if (!this.session || !canPrintPostcard(this.session)) return;
    await this.guard(async () => {
      this.postcardSvg = await this.client.postcard(this.session!.session_id);
      this.session = await this.client.session(this.session!.session_id);
      this.view = "postcard";
    });
  }

  async recordConsent(decision: "donated" | "withheld"): Promise<void> {
    if (!this.session || !canRecordConsent(this.session)) return;
    await this.guard(async () => {
      const result = await this.client.consent(this.session!.session_id, decision);
      this.decision = result.decision;
      this.view = "done";
    });
  }

  // -- rendering ---------------------------------------------------------------

  render(): void {
    this.root.innerHTML = "";
    const screen = el(`<main class="screen" data-view="${this.view}"></main>`);
    if (this.banner) {
      const bannerEl = el(`<div id="banner" class="banner" role="alert"></div>`);
      bannerEl.textContent = `${this.banner} — please try again`;
      screen.appendChild(bannerEl);
    }
    screen.appendChild(this.renderView());
    this.root.appendChild(screen);
  }

  private renderView(): HTMLElement {
    switch (this.view) {
      case "start":
        return this.renderStart();
      case "grid":
        return this.renderGrid();
      case "painting":
        return this.renderPainting();
      case "playback":
        return this.renderPlayback();
      case "report":
        return this.renderReport();
      case "kiosk":
        return this.renderKiosk();
      case "call":
        return this.renderCall();
      case "postcard":
        return this.renderPostcard();
      case "done":
        return this.renderDone();
    }
  }

  private renderStart(): HTMLElement {
    const section = el(`<section>
      <h1>Sensitive visit</h1>
      <p>Choose emotions, find the paintings they belong to, and tell us
      what you felt. At the end you decide what happens to your data.</p>
      <button id="begin">Begin</button>
    </section>`);
    section.querySelector("#begin")!.addEventListener("click", () => void this.begin());
    return section;
  }

  private renderGrid(): HTMLElement {
    const view = this.session!;
    const catalog = this.catalog!;
    const section = el(`<section>
      <p id="visitor-code">Your visitor code: <strong>${view.code}</strong></p>
      <h2>How do you want to feel?</h2>
      <div id="emotion-grid" class="grid"></div>
      <div id="grid-footer"></div>
    </section>`);
    const grid = section.querySelector("#emotion-grid")!;
    for (const entry of catalog.emotions) {
      const tile = el(`<button class="emotion-tile" data-emotion="${entry.id}"></button>`);
      tile.textContent = entry.display_name;
      if (!canChooseEmotion(view, entry.id)) {
        tile.setAttribute("disabled", "");
      }
      tile.addEventListener("click", () => void this.choose(entry.id));
      grid.appendChild(tile);
    }
    const footer = section.querySelector("#grid-footer")!;
    if (allEmotionsUsed(view, catalog)) {
      grid.replaceChildren();
      grid.appendChild(el(`<p id="all-done-prompt">You have experienced all six
        paintings. Please return to the desk for your conversation with the
        artist.</p>`));
    }
    if (canScan(view)) {
      const toDesk = el(`<button id="to-desk">I am done — take me to the interview desk</button>`);
      toDesk.addEventListener("click", () => this.goToKiosk());
      footer.appendChild(toDesk);
    }
    return section;
  }

  private renderPainting(): HTMLElement {
    const view = this.session!;
    const entry = this.entryFor(view.current_emotion!);
    const year = entry.painting.year ? ` (${entry.painting.year})` : "";
    const section = el(`<section>
      <h2 id="painting-title"></h2>
      <p id="locate-instruction">Find this painting in the museum. When you are
      standing in front of it, press play.</p>
      <img id="painting-image" alt="" src="${entry.painting.image_ref}">
      <button id="play-script">Play</button>
    </section>`);
    section.querySelector("#painting-title")!.textContent =
      entry.painting.title + year;
    const play = section.querySelector("#play-script")!;
    if (!canPlayScript(view)) play.setAttribute("disabled", "");
    play.addEventListener("click", () => this.playScript());
    return section;
  }

  private renderPlayback(): HTMLElement {
    const section = el(`<section>
      <p id="segment-label" class="segment-label"></p>
      <p id="segment-text"></p>
      <button id="finish-script">Continue</button>
    </section>`);
    section.querySelector("#segment-label")!.textContent = this.playbackSegment;
    section.querySelector("#segment-text")!.textContent = this.playbackText;
    const finish = section.querySelector("#finish-script")!;
    if (!this.playbackSkippable) finish.setAttribute("disabled", "");
    finish.addEventListener("click", () => this.skipToReport());
    return section;
  }

  private renderReport(): HTMLElement {
    const view = this.session!;
    const entry = this.entryFor(view.current_emotion!);
    const section = el(`<section>
      <h2>What did you feel at ${"“"}${entry.painting.title}${"”"}?</h2>
      <form id="report-form">
        <label>unpleasant / pleasant
          <input id="valence" type="range" min="0" max="100" step="1" value="50">
        </label>
        <label>calm / excited
          <input id="arousal" type="range" min="0" max="100" step="1" value="50">
        </label>
        <label>controlled / in control
          <input id="control" type="range" min="0" max="100" step="1" value="50">
        </label>
        <label>Describe it in your own words
          <textarea id="free-text" maxlength="280" rows="3"></textarea>
        </label>
        <p id="inline-error" class="inline-error" hidden></p>
        <button id="submit-report" type="button">Share</button>
      </form>
    </section>`);
    if (this.inlineError) {
      const errorEl = section.querySelector("#inline-error") as HTMLElement;
      errorEl.hidden = false;
      errorEl.textContent = this.inlineError;
    }
    const submit = section.querySelector("#submit-report")!;
    if (!canSubmitReport(view)) submit.setAttribute("disabled", "");
    submit.addEventListener("click", () => void this.submitReport());
    return section;
  }

  private renderKiosk(): HTMLElement {
    const view = this.session!;
    const section = el(`<section>
      <h2>The telephone desk</h2>
      <p>Take a seat, insert your visitor card, and wait for the phone to
      ring.</p>
      <label>Visitor card code
        <input id="token-input" inputmode="numeric" value="${view.code}">
      </label>
      <button id="scan-card">Insert card</button>
    </section>`);
    section.querySelector("#scan-card")!.addEventListener("click", () => void this.scanCard());
    return section;
  }

  private renderCall(): HTMLElement {
    const view = this.session!;
    const video = view.video!;
    const section = el(`<section>
      <h2>On the line</h2>
      <p id="video-ref" class="asset-ref"></p>
      <blockquote id="video-transcript"></blockquote>
      <button id="end-call">Hang up</button>
      <button id="print-postcard" hidden>Print my postcard</button>
    </section>`);
    section.querySelector("#video-ref")!.textContent =
      `${video.media_ref} (${video.polarity})`;
    section.querySelector("#video-transcript")!.textContent = video.transcript;
    const endCall = section.querySelector("#end-call") as HTMLElement;
    const print = section.querySelector("#print-postcard") as HTMLElement;
    if (!canEndCall(view)) endCall.setAttribute("disabled", "");
    if (canPrintPostcard(view)) {
      endCall.hidden = true;
      print.hidden = false;
    }
    endCall.addEventListener("click", () => void this.endCall());
    print.addEventListener("click", () => void this.printPostcard());
    return section;
  }

  private renderPostcard(): HTMLElement {
    const view = this.session!;
    const section = el(`<section>
      <h2>Your postcard</h2>
      <div id="postcard-svg"></div>
      <p>Would you like to donate your data to the museum, or should we
      delete it?</p>
      <button id="consent-donate">Donate my data</button>
      <button id="consent-withhold">Delete my data</button>
    </section>`);
    section.querySelector("#postcard-svg")!.innerHTML = this.postcardSvg;
    const donate = section.querySelector("#consent-donate")!;
    const withhold = section.querySelector("#consent-withhold")!;
    if (!canRecordConsent(view)) {
      donate.setAttribute("disabled", "");
      withhold.setAttribute("disabled", "");
    }
    donate.addEventListener("click", () => void this.recordConsent("donated"));
    withhold.addEventListener("click", () => void this.recordConsent("withheld"));
    return section;
  }

  private renderDone(): HTMLElement {
    const message =
      this.decision === "Donated"
        ? "Thank you for donating your data. Keep the postcard."
        : "Your data has been deleted. The postcard is yours to keep.";
    const section = el(`<section><p id="farewell"></p></section>`);
    section.querySelector("#farewell")!.textContent = message;
    return section;
  }
}
