/**
 * Append-only session history. Lives only in memory: the service is the
 * source of truth and the console keeps no state beyond the browser session.
 */

export type EntryKind = "query" | "expert edit";

export interface SessionEntry {
  kind: EntryKind;
  /** what the user typed (question text or RA text) */
  input: string;
  /** exact request body bytes, for byte-identical resubmission */
  requestBody: string;
  verdict: string;
  summary: string;
  timestamp: Date;
}

export class SessionHistory {
  private readonly entries: SessionEntry[] = [];

  add(entry: SessionEntry): void {
    this.entries.push(entry);
  }

  list(): readonly SessionEntry[] {
    return this.entries;
  }

  get length(): number {
    return this.entries.length;
  }
}
