// Pure view-model helpers.  The rule the whole UI follows: a control is
// enabled only when the server's last acknowledged session view says the
// corresponding transition is legal, so the server never sees a request
// it has to refuse.

import type { CatalogView, SessionView } from "./api.js";

export const FREE_TEXT_MAX = 280;

export function canChooseEmotion(view: SessionView, emotionId: string): boolean {
  if (view.phase !== "Registered" && view.phase !== "Touring") return false;
  return !view.emotions_used.includes(emotionId);
}

export function canPlayScript(view: SessionView): boolean {
  return (
    view.phase === "Touring" &&
    view.touring_sub === "Selected" &&
    view.current_emotion !== null
  );
}

export function canSubmitReport(view: SessionView): boolean {
  return view.phase === "Touring" && view.touring_sub === "Reporting";
}

export function canScan(view: SessionView): boolean {
  if (view.report_count < 1) return false;
  return view.phase === "Registered" || view.phase === "Touring";
}

export function canEndCall(view: SessionView): boolean {
  return view.phase === "InCall" && !view.interview_ended;
}

export function canPrintPostcard(view: SessionView): boolean {
  return view.phase === "InCall" && view.interview_ended;
}

export function canRecordConsent(view: SessionView): boolean {
  return view.phase === "PostcardIssued";
}

export function allEmotionsUsed(view: SessionView, catalog: CatalogView): boolean {
  return catalog.emotions.every((e) => view.emotions_used.includes(e.id));
}

export function validateFreeText(text: string): string | null {
  if (text.length > FREE_TEXT_MAX) {
    return `TextTooLong: ${text.length} characters (limit ${FREE_TEXT_MAX})`;
  }
  return null;
}
