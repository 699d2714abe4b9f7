// Payload shapes of the annotation service REST API. The server is the
// single source of truth; everything here mirrors its JSON exactly.

export interface ConversationSummary {
  id: string
  mention_count: number
}

export interface TokenPayload {
  form: string
  pos: string
  af: string
}

export interface UtterancePayload {
  speaker: string
  text: string
  tokens: TokenPayload[]
}

export interface MentionPayload {
  id: string
  utterance: number
  span: [number, number]
  head: string
  gender: string
  number: string
  person: string
  pop: boolean
  actor: string
}

export interface ConversationPayload {
  id: string
  speakers: string[]
  utterances: UtterancePayload[]
  mentions: MentionPayload[]
  chains: string[][]
}

export interface AnnotationRecord {
  conversation: string
  antecedent: string
  anaphor: string
  label: boolean
  annotator: string
}

export interface PairSubmission {
  antecedent: string
  anaphor: string
  label: boolean
  annotator: string
}

export interface GoldPair {
  antecedent: string
  anaphor: string
  label: boolean
}

export interface ConflictEntry {
  antecedent: string
  anaphor: string
  labels: Record<string, boolean>
  resolved: boolean
}

export interface AdjudicationPayload {
  annotators: string[]
  gold: GoldPair[]
  conflicts: ConflictEntry[]
  needs_third_review: boolean
}

export interface Suggestion {
  antecedent: string
  probability: number
}

export interface SuggestionsPayload {
  suggestions: Record<string, Suggestion[]>
}

export function pairKey(antecedent: string, anaphor: string): string {
  return `${antecedent}␟${anaphor}`
}
