// Timed three-segment script playback (story -> fact -> question).
// Audio files are optional museum assets; the app renders the text of
// each segment for its configured duration.  Skipping ahead is disabled
// until the question segment is reached.

import type { ScriptInfo } from "./api.js";

export type SegmentName = "story" | "fact" | "question";

export interface Segment {
  name: SegmentName;
  text: string;
  durationS: number;
}

export type Scheduler = (fn: () => void, delayMs: number) => void;

export function segmentsOf(script: ScriptInfo): Segment[] {
  return [
    { name: "story", text: script.story_text, durationS: script.durations.story_s },
    { name: "fact", text: script.fact_text, durationS: script.durations.fact_s },
    { name: "question", text: script.question_text, durationS: script.durations.question_s },
  ];
}

export class ScriptPlayback {
  private index = 0;
  private cancelled = false;

  constructor(
    private readonly segments: Segment[],
    private readonly onSegment: (segment: Segment, skippable: boolean) => void,
    private readonly onComplete: () => void,
    private readonly scheduler: Scheduler,
    private readonly msPerSecond: number,
  ) {}

  start(): void {
    this.show();
  }

  /** Only legal once the question segment is showing. */
  get skippable(): boolean {
    return this.segments[this.index]?.name === "question";
  }

  skip(): void {
    if (!this.skippable || this.cancelled) return;
    this.cancelled = true;
    this.onComplete();
  }

  cancel(): void {
    this.cancelled = true;
  }

  private show(): void {
    if (this.cancelled) return;
    const segment = this.segments[this.index];
    this.onSegment(segment, this.skippable);
    this.scheduler(() => this.advance(), segment.durationS * this.msPerSecond);
  }

  private advance(): void {
    if (this.cancelled) return;
    this.index += 1;
    if (this.index >= this.segments.length) {
      this.cancelled = true;
      this.onComplete();
      return;
    }
    this.show();
  }
}
