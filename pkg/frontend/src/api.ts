import type {
  AdjudicationPayload,
  AnnotationRecord,
  ConversationPayload,
  ConversationSummary,
  PairSubmission,
  SuggestionsPayload,
} from "./types.js"

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message)
  }
}

async function parseBody(res: Response): Promise<unknown> {
  const text = await res.text()
  try {
    return text ? JSON.parse(text) : null
  } catch {
    throw new ApiError(res.status, `non-JSON response: ${text.slice(0, 120)}`)
  }
}

async function check<T>(res: Response): Promise<T> {
  const body = await parseBody(res)
  if (!res.ok) {
    const message =
      body && typeof body === "object" && "error" in body
        ? String((body as { error: unknown }).error)
        : `HTTP ${res.status}`
    throw new ApiError(res.status, message)
  }
  return body as T
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path
  }

  async listConversations(): Promise<ConversationSummary[]> {
    return check(await fetch(this.url("/api/conversations")))
  }

  async getConversation(id: string): Promise<ConversationPayload> {
    return check(await fetch(this.url(`/api/conversations/${encodeURIComponent(id)}`)))
  }

  async getPairs(id: string, annotator?: string): Promise<AnnotationRecord[]> {
    const query = annotator ? `?annotator=${encodeURIComponent(annotator)}` : ""
    return check(
      await fetch(this.url(`/api/conversations/${encodeURIComponent(id)}/pairs${query}`)),
    )
  }

  async submitPair(id: string, submission: PairSubmission): Promise<AnnotationRecord> {
    return check(
      await fetch(this.url(`/api/conversations/${encodeURIComponent(id)}/pairs`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(submission),
      }),
    )
  }

  async getAdjudication(id: string): Promise<AdjudicationPayload> {
    return check(
      await fetch(this.url(`/api/conversations/${encodeURIComponent(id)}/adjudication`)),
    )
  }

  async getSuggestions(id: string, anaphor?: string): Promise<SuggestionsPayload> {
    const query = anaphor ? `?anaphor=${encodeURIComponent(anaphor)}` : ""
    return check(
      await fetch(
        this.url(`/api/conversations/${encodeURIComponent(id)}/suggestions${query}`),
      ),
    )
  }
}
