// Browser glue: renders view models into the page and wires events. All
// domain logic lives in session/transcript/conflicts, which are unit tested;
// this layer stays a thin mapping from state to DOM.

import type { AnnotationSession } from "./session.js"
import type { ReviewQueue } from "./conflicts.js"
import type { Suggestion } from "./types.js"
import type { TranscriptModel } from "./transcript.js"

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  if (className) node.className = className
  if (text !== undefined) node.textContent = text
  return node
}

export function renderErrorBanner(container: HTMLElement, message: string): void {
  container.replaceChildren()
  const banner = el("div", "error-banner", `cannot render conversation: ${message}`)
  container.appendChild(banner)
}

export function renderTranscript(
  container: HTMLElement,
  model: TranscriptModel,
  session: AnnotationSession,
  onSelectionChange: () => void,
): void {
  container.replaceChildren()
  for (const line of model.lines) {
    const row = el("div", "utterance")
    row.appendChild(el("span", "speaker", line.speaker + ":"))
    const body = el("span", "utterance-text")
    for (const segment of line.segments) {
      if (segment.kind === "plain") {
        body.appendChild(document.createTextNode(" " + segment.text + " "))
      } else {
        const span = el("span", "mention", segment.text)
        span.dataset.mentionId = segment.mentionId
        span.title = segment.tooltip
        span.addEventListener("click", () => {
          session.toggle(segment.mentionId)
          syncSelectionClasses(container, session)
          onSelectionChange()
        })
        body.appendChild(span)
      }
    }
    row.appendChild(body)
    container.appendChild(row)
  }
  syncSelectionClasses(container, session)
}

export function syncSelectionClasses(
  container: HTMLElement,
  session: AnnotationSession,
): void {
  const selected = new Set(session.selection)
  const pair = session.selectedPair()
  container.querySelectorAll<HTMLElement>(".mention").forEach((node) => {
    const id = node.dataset.mentionId ?? ""
    node.classList.toggle("selected", selected.has(id))
    node.classList.toggle("antecedent", pair?.antecedent === id)
    node.classList.toggle("anaphor", pair?.anaphor === id)
  })
}

export function renderRecordList(
  container: HTMLElement,
  session: AnnotationSession,
): void {
  container.replaceChildren()
  const latest = [...session.latestLabels().values()]
  if (latest.length === 0) {
    container.appendChild(el("p", "empty", "no pairs submitted yet"))
    return
  }
  for (const record of latest) {
    const row = el(
      "div",
      record.label ? "record true-pair" : "record false-pair",
      `${record.antecedent} → ${record.anaphor} : ${record.label}`,
    )
    container.appendChild(row)
  }
}

export function renderReviewQueue(
  container: HTMLElement,
  queue: ReviewQueue,
  onResolved: () => void,
): void {
  container.replaceChildren()
  if (!queue.loaded) {
    container.appendChild(el("p", "empty", "loading adjudication…"))
    return
  }
  if (queue.fullyAdjudicated) {
    container.appendChild(el("p", "all-clear", "fully adjudicated"))
    return
  }
  for (const conflict of queue.pending) {
    const row = el("div", "conflict")
    const labels = Object.entries(conflict.labels)
      .map(([who, label]) => `${who}: ${label}`)
      .join(", ")
    row.appendChild(
      el("span", "conflict-pair", `${conflict.antecedent} → ${conflict.anaphor} (${labels}) `),
    )
    for (const decision of [true, false]) {
      const button = el("button", "resolve", String(decision))
      button.addEventListener("click", () => {
        void queue
          .resolve(conflict.antecedent, conflict.anaphor, decision)
          .then(onResolved)
      })
      row.appendChild(button)
    }
    container.appendChild(row)
  }
}

export function renderSuggestions(
  container: HTMLElement,
  suggestions: Record<string, Suggestion[]>,
  limit = 3,
): void {
  container.replaceChildren()
  for (const [anaphor, scored] of Object.entries(suggestions)) {
    const top = scored
      .slice(0, limit)
      .map((s) => `${s.antecedent} ${(100 * s.probability).toFixed(0)}%`)
      .join(", ")
    container.appendChild(el("div", "suggestion", `${anaphor} ← ${top}`))
  }
}
