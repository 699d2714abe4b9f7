// Third-reviewer queue. The server's adjudication endpoint is re-fetched
// after every action, so refresh races converge on server truth.

import type {
  AdjudicationPayload,
  AnnotationRecord,
  ConflictEntry,
  PairSubmission,
} from "./types.js"

export interface ReviewApi {
  getAdjudication(id: string): Promise<AdjudicationPayload>
  submitPair(id: string, submission: PairSubmission): Promise<AnnotationRecord>
}

export class ReviewQueue {
  private state: AdjudicationPayload | null = null

  constructor(
    private api: ReviewApi,
    readonly conversationId: string,
    readonly reviewer: string,
  ) {}

  async refresh(): Promise<void> {
    this.state = await this.api.getAdjudication(this.conversationId)
  }

  get loaded(): boolean {
    return this.state !== null
  }

  /** Conflicts still waiting for this reviewer's decision. */
  get pending(): ConflictEntry[] {
    return (this.state?.conflicts ?? []).filter((c) => !c.resolved)
  }

  get resolved(): ConflictEntry[] {
    return (this.state?.conflicts ?? []).filter((c) => c.resolved)
  }

  get fullyAdjudicated(): boolean {
    return this.state !== null && !this.state.needs_third_review
  }

  get annotators(): string[] {
    return this.state?.annotators ?? []
  }

  /** Submit the reviewer's label for a conflicted pair and re-sync. */
  async resolve(antecedent: string, anaphor: string, label: boolean): Promise<void> {
    await this.api.submitPair(this.conversationId, {
      antecedent,
      anaphor,
      label,
      annotator: this.reviewer,
    })
    await this.refresh()
  }
}
