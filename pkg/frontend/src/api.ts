// Typed client for the gateway's HTTP endpoints.  Every mutation waits
// for the server's acknowledgment and returns its session view; there is
// no optimistic state anywhere in the app.

export type Phase =
  | "Registered"
  | "Touring"
  | "InterviewReady"
  | "InCall"
  | "PostcardIssued"
  | "ConsentResolved";

export type TouringSub = "Selected" | "Listening" | "Reporting";

export interface PaintingInfo {
  id: string;
  title: string;
  year: number | null;
  image_ref: string;
}

export interface ScriptInfo {
  story_text: string;
  fact_text: string;
  question_text: string;
  durations: { story_s: number; fact_s: number; question_s: number };
}

export interface EmotionEntry {
  id: string;
  display_name: string;
  painting: PaintingInfo;
  script: ScriptInfo;
}

export interface VideoInfo {
  painting_id: string;
  polarity: "positive" | "negative";
  media_ref: string;
  transcript: string;
}

export interface CatalogView {
  emotions: EmotionEntry[];
  videos: VideoInfo[];
}

export interface SessionView {
  session_id: string;
  code: string;
  phase: Phase;
  touring_sub: TouringSub | null;
  current_emotion: string | null;
  emotions_used: string[];
  report_count: number;
  interview_ended: boolean;
  consent: "Donated" | "Withheld" | null;
  video: VideoInfo | null;
  painting?: PaintingInfo;
  order_index?: number;
  total_frames?: number;
  video_choice?: { painting_id: string; polarity: string; source_report_index: number };
}

export interface ConsentResult {
  session_id: string;
  phase: Phase;
  decision: "Donated" | "Withheld";
  deleted: boolean;
}

export interface ReportSubmission {
  emotion_id: string;
  valence: number;
  arousal: number;
  control: number;
  free_text: string;
}

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class GatewayClient {
  /** Rejected mutations observed at the wire; a correct UI keeps this empty. */
  readonly rejections: ApiError[] = [];

  constructor(private readonly base: string) {}

  private async request<T>(method: string, path: string, body?: unknown,
                           raw = false): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      if (typeof body === "string") {
        (init.headers as Record<string, string>)["content-type"] = "text/csv";
        init.body = body;
      } else {
        (init.headers as Record<string, string>)["content-type"] = "application/json";
        init.body = JSON.stringify(body);
      }
    }
    const response = await fetch(this.base + path, init);
    if (!response.ok) {
      let code = "HttpError";
      let message = response.statusText;
      try {
        const parsed = await response.json();
        code = parsed.code ?? code;
        message = parsed.message ?? message;
      } catch {
        // non-JSON error body; keep the status text
      }
      const error = new ApiError(code, message, response.status);
      this.rejections.push(error);
      throw error;
    }
    if (raw) {
      return (await response.text()) as unknown as T;
    }
    return (await response.json()) as T;
  }

  catalog(): Promise<CatalogView> {
    return this.request("GET", "/catalog");
  }

  createSession(): Promise<SessionView> {
    return this.request("POST", "/sessions");
  }

  session(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  choose(id: string, emotionId: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/choice`, { emotion_id: emotionId });
  }

  scriptPlayed(id: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/script-played`);
  }

  report(id: string, submission: ReportSubmission): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/report`, submission);
  }

  scan(token: string): Promise<SessionView> {
    return this.request("POST", "/kiosk/scan", { token });
  }

  uploadFau(id: string, csv: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/fau`, csv);
  }

  interviewEnded(id: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/interview-ended`);
  }

  postcard(id: string): Promise<string> {
    return this.request("POST", `/sessions/${id}/postcard`, undefined, true);
  }

  consent(id: string, decision: "donated" | "withheld"): Promise<ConsentResult> {
    return this.request("POST", `/sessions/${id}/consent`, { decision });
  }
}
