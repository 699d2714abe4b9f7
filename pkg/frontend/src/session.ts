// Annotation session state: a two-slot mention selection that normalizes to
// document order, plus a local mirror of server-acknowledged records. The
// mirror only ever grows through 201 responses or a reload from the server,
// so the UI cannot fabricate records.

import type { AnnotationRecord, PairSubmission } from "./types.js"
import { pairKey } from "./types.js"
import { compareOrder, type DocOrderKey } from "./transcript.js"

export interface SessionApi {
  getPairs(id: string, annotator?: string): Promise<AnnotationRecord[]>
  submitPair(id: string, submission: PairSubmission): Promise<AnnotationRecord>
}

export interface NormalizedPair {
  antecedent: string
  anaphor: string
}

export class AnnotationSession {
  readonly records: AnnotationRecord[] = []
  private selected: string[] = []

  constructor(
    private api: SessionApi,
    readonly conversationId: string,
    readonly annotator: string,
    private order: Map<string, DocOrderKey>,
  ) {}

  /** Restore the mirror from the server log (page reload, reconnect). */
  async loadExisting(): Promise<void> {
    const records = await this.api.getPairs(this.conversationId, this.annotator)
    this.records.length = 0
    this.records.push(...records)
  }

  get selection(): string[] {
    return [...this.selected]
  }

  /** Click a mention: toggles it; a third pick evicts the oldest one. */
  toggle(mentionId: string): void {
    if (!this.order.has(mentionId)) {
      throw new Error(`unknown mention ${mentionId}`)
    }
    const index = this.selected.indexOf(mentionId)
    if (index !== -1) {
      this.selected.splice(index, 1)
      return
    }
    this.selected.push(mentionId)
    if (this.selected.length > 2) {
      this.selected.shift()
    }
  }

  clearSelection(): void {
    this.selected = []
  }

  /** The pending pair in document order, or null until two are selected. */
  selectedPair(): NormalizedPair | null {
    if (this.selected.length !== 2) return null
    const [a, b] = this.selected
    const ka = this.order.get(a)!
    const kb = this.order.get(b)!
    return compareOrder(ka, kb) < 0
      ? { antecedent: a, anaphor: b }
      : { antecedent: b, anaphor: a }
  }

  canSubmit(): boolean {
    return this.selectedPair() !== null
  }

  /**
   * Submit the pending pair. The record joins the mirror only after the
   * server acknowledges it; on failure the selection survives for a retry.
   */
  async submit(label: boolean): Promise<AnnotationRecord> {
    const pair = this.selectedPair()
    if (pair === null) {
      throw new Error("select exactly two distinct mentions first")
    }
    const record = await this.api.submitPair(this.conversationId, {
      ...pair,
      label,
      annotator: this.annotator,
    })
    this.records.push(record)
    this.clearSelection()
    return record
  }

  /** Latest label per pair: repeated submissions display last-write-wins. */
  latestLabels(): Map<string, AnnotationRecord> {
    const latest = new Map<string, AnnotationRecord>()
    for (const record of this.records) {
      latest.set(pairKey(record.antecedent, record.anaphor), record)
    }
    return latest
  }
}
