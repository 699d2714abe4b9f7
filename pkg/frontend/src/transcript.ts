// Pure view-model construction for the transcript panel. Validation happens
// up front: a payload that does not fit the schema raises TranscriptError and
// nothing renders (the page shows an error banner instead of a partial view).

import type { ConversationPayload, MentionPayload } from "./types.js"

export class TranscriptError extends Error {}

export type DocOrderKey = [number, number, number, string]

export interface MentionSegment {
  kind: "mention"
  mentionId: string
  text: string
  tooltip: string
}

export interface PlainSegment {
  kind: "plain"
  text: string
}

export type Segment = MentionSegment | PlainSegment

export interface TranscriptLine {
  speaker: string
  segments: Segment[]
}

export interface TranscriptModel {
  conversationId: string
  lines: TranscriptLine[]
  order: Map<string, DocOrderKey>
}

export function mentionTooltip(mention: MentionPayload): string {
  const parts = [
    `gender: ${mention.gender}`,
    `number: ${mention.number}`,
    `person: ${mention.person}`,
    `part-of-plural: ${mention.pop ? "yes" : "no"}`,
    `actor: ${mention.actor}`,
  ]
  return parts.join("\n")
}

export function documentOrder(mention: MentionPayload): DocOrderKey {
  return [mention.utterance, mention.span[0], mention.span[1], mention.id]
}

export function compareOrder(a: DocOrderKey, b: DocOrderKey): number {
  for (let i = 0; i < 3; i++) {
    const d = (a[i] as number) - (b[i] as number)
    if (d !== 0) return d
  }
  return a[3] < b[3] ? -1 : a[3] > b[3] ? 1 : 0
}

function validate(payload: ConversationPayload): void {
  if (!payload || typeof payload.id !== "string" || !Array.isArray(payload.utterances)) {
    throw new TranscriptError("conversation payload is missing id or utterances")
  }
  const seen = new Set<string>()
  for (const mention of payload.mentions ?? []) {
    if (typeof mention.id !== "string" || mention.id === "") {
      throw new TranscriptError("mention without an id")
    }
    if (seen.has(mention.id)) {
      throw new TranscriptError(`duplicate mention id ${mention.id}`)
    }
    seen.add(mention.id)
    const utterance = payload.utterances[mention.utterance]
    if (utterance === undefined) {
      throw new TranscriptError(
        `mention ${mention.id} points at utterance ${mention.utterance}, which does not exist`,
      )
    }
    const [start, end] = mention.span ?? [NaN, NaN]
    if (!(start >= 0 && start < end && end <= utterance.tokens.length)) {
      throw new TranscriptError(
        `mention ${mention.id} span [${start}, ${end}) does not fit its utterance`,
      )
    }
  }
}

export function buildTranscript(payload: ConversationPayload): TranscriptModel {
  validate(payload)
  const order = new Map<string, DocOrderKey>()
  for (const mention of payload.mentions) {
    order.set(mention.id, documentOrder(mention))
  }

  const lines: TranscriptLine[] = payload.utterances.map((utterance, index) => {
    const mentionsHere = payload.mentions
      .filter((m) => m.utterance === index)
      .sort((a, b) => compareOrder(documentOrder(a), documentOrder(b)))
    const segments: Segment[] = []
    let cursor = 0
    for (const mention of mentionsHere) {
      const [start, end] = mention.span
      if (start < cursor) continue // nested span: outer highlight already covers it
      if (start > cursor) {
        segments.push({
          kind: "plain",
          text: utterance.tokens.slice(cursor, start).map((t) => t.form).join(" "),
        })
      }
      segments.push({
        kind: "mention",
        mentionId: mention.id,
        text: utterance.tokens.slice(start, end).map((t) => t.form).join(" "),
        tooltip: mentionTooltip(mention),
      })
      cursor = end
    }
    if (cursor < utterance.tokens.length) {
      segments.push({
        kind: "plain",
        text: utterance.tokens.slice(cursor).map((t) => t.form).join(" "),
      })
    }
    return { speaker: utterance.speaker, segments }
  })

  return { conversationId: payload.id, lines, order }
}
