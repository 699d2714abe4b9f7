import { describe, expect, it } from "vitest"

import { buildTranscript, compareOrder, TranscriptError } from "../src/transcript.js"
import type { ConversationPayload, MentionPayload } from "../src/types.js"

function mention(partial: Partial<MentionPayload> & { id: string }): MentionPayload {
  return {
    utterance: 0,
    span: [0, 1],
    head: "w",
    gender: "any",
    number: "sg",
    person: "3",
    pop: false,
    actor: "neither",
    ...partial,
  }
}

function payload(): ConversationPayload {
  return {
    id: "c1",
    speakers: ["A", "B"],
    utterances: [
      {
        speaker: "A",
        text: "rAmu pustakam icchADu",
        tokens: [
          { form: "rAmu", pos: "NNP", af: "rAmu,n,m,sg,3,," },
          { form: "pustakam", pos: "NN", af: "pustakam,n,,sg,," },
          { form: "icchADu", pos: "VM", af: "iccu,v,m,sg,3,,A,A" },
        ],
      },
      {
        speaker: "B",
        text: "atanu unnADu",
        tokens: [
          { form: "atanu", pos: "PRP", af: "atanu,pn,m,sg,3,," },
          { form: "unnADu", pos: "VM", af: "unDu,v,m,sg,3,,A,A" },
        ],
      },
    ],
    mentions: [
      mention({ id: "m1", utterance: 0, span: [0, 1], gender: "m" }),
      mention({ id: "m2", utterance: 0, span: [1, 2] }),
      mention({ id: "m3", utterance: 1, span: [0, 1], gender: "m", actor: "hearer" }),
    ],
    chains: [["m1", "m3"]],
  }
}

describe("buildTranscript", () => {
  it("renders one line per utterance with clickable mention segments", () => {
    const model = buildTranscript(payload())
    expect(model.lines).toHaveLength(2)
    const mentionSegments = model.lines.flatMap((l) =>
      l.segments.filter((s) => s.kind === "mention"),
    )
    expect(mentionSegments.map((s) => s.kind === "mention" && s.mentionId)).toEqual([
      "m1",
      "m2",
      "m3",
    ])
    expect(model.lines[0].speaker).toBe("A")
  })

  it("carries morphology, pop and actor into the tooltip", () => {
    const model = buildTranscript(payload())
    const seg = model.lines[1].segments.find((s) => s.kind === "mention")
    expect(seg && seg.kind === "mention" && seg.tooltip).toContain("gender: m")
    expect(seg && seg.kind === "mention" && seg.tooltip).toContain("actor: hearer")
  })

  it("keeps plain text between mentions", () => {
    const model = buildTranscript(payload())
    const texts = model.lines[0].segments.map((s) => s.text)
    expect(texts.join(" ").split(/\s+/)).toContain("icchADu")
  })

  it("orders mentions for antecedent normalization", () => {
    const model = buildTranscript(payload())
    const m1 = model.order.get("m1")!
    const m3 = model.order.get("m3")!
    expect(compareOrder(m1, m3)).toBeLessThan(0)
  })

  it("rejects a mention pointing at a missing utterance", () => {
    const bad = payload()
    bad.mentions[0] = mention({ id: "m1", utterance: 9 })
    expect(() => buildTranscript(bad)).toThrow(TranscriptError)
  })

  it("rejects a span outside its utterance", () => {
    const bad = payload()
    bad.mentions[0] = mention({ id: "m1", span: [0, 99] })
    expect(() => buildTranscript(bad)).toThrow(/does not fit/)
  })

  it("rejects duplicate mention ids", () => {
    const bad = payload()
    bad.mentions.push(mention({ id: "m1", utterance: 1 }))
    expect(() => buildTranscript(bad)).toThrow(/duplicate/)
  })
})
