// Page bootstrap: pick annotator + conversation, build the session, render.
// Server state is re-fetched after every mutation, so a reload always
// reconstructs the same view from the REST API alone.

import { ApiClient, ApiError } from "./api.js"
import { ReviewQueue } from "./conflicts.js"
import {
  renderErrorBanner,
  renderRecordList,
  renderReviewQueue,
  renderSuggestions,
  renderTranscript,
  syncSelectionClasses,
} from "./dom.js"
import { AnnotationSession } from "./session.js"
import { buildTranscript, TranscriptError } from "./transcript.js"

const api = new ApiClient("")

function byId(id: string): HTMLElement {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing #${id} in index.html`)
  return node
}

async function openConversation(conversationId: string, annotator: string): Promise<void> {
  const transcriptBox = byId("transcript")
  const recordsBox = byId("records")
  const queueBox = byId("queue")
  const suggestionsBox = byId("suggestions")
  const submitTrue = byId("submit-true") as HTMLButtonElement
  const submitFalse = byId("submit-false") as HTMLButtonElement
  const status = byId("status")

  let payload
  try {
    payload = await api.getConversation(conversationId)
  } catch (err) {
    renderErrorBanner(transcriptBox, err instanceof Error ? err.message : String(err))
    return
  }

  let model
  try {
    model = buildTranscript(payload)
  } catch (err) {
    if (err instanceof TranscriptError) {
      renderErrorBanner(transcriptBox, err.message)
      return
    }
    throw err
  }

  const session = new AnnotationSession(api, conversationId, annotator, model.order)
  await session.loadExisting()
  const queue = new ReviewQueue(api, conversationId, annotator)
  await queue.refresh()

  const refreshControls = () => {
    const enabled = session.canSubmit()
    submitTrue.disabled = !enabled
    submitFalse.disabled = !enabled
    renderRecordList(recordsBox, session)
    renderReviewQueue(queueBox, queue, refreshControls)
  }

  renderTranscript(transcriptBox, model, session, refreshControls)
  refreshControls()

  const submit = async (label: boolean) => {
    try {
      await session.submit(label)
      status.textContent = "saved"
    } catch (err) {
      // selection survives, so the annotator can retry
      const message = err instanceof ApiError ? err.message : "network error"
      status.textContent = `submit failed: ${message} (retry)`
    }
    await queue.refresh()
    syncSelectionClasses(transcriptBox, session)
    refreshControls()
  }
  submitTrue.onclick = () => void submit(true)
  submitFalse.onclick = () => void submit(false)

  const suggestToggle = byId("show-suggestions") as HTMLInputElement
  suggestToggle.onchange = async () => {
    if (!suggestToggle.checked) {
      suggestionsBox.replaceChildren()
      return
    }
    try {
      const payload = await api.getSuggestions(conversationId)
      renderSuggestions(suggestionsBox, payload.suggestions)
    } catch (err) {
      suggestionsBox.textContent =
        err instanceof ApiError ? err.message : "suggestions unavailable"
    }
  }
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search)
  const annotator = params.get("annotator") ?? "r1"
  byId("annotator-name").textContent = annotator

  const list = byId("conversation-list")
  const summaries = await api.listConversations()
  for (const summary of summaries) {
    const item = document.createElement("li")
    const link = document.createElement("a")
    link.href = "#"
    link.textContent = `${summary.id} (${summary.mention_count} mentions)`
    link.onclick = (event) => {
      event.preventDefault()
      void openConversation(summary.id, annotator)
    }
    item.appendChild(link)
    list.appendChild(item)
  }

  const requested = params.get("conversation")
  if (requested) {
    await openConversation(requested, annotator)
  }
}

void boot()
