import { describe, expect, it } from "vitest"

import { AnnotationSession, type SessionApi } from "../src/session.js"
import type { AnnotationRecord, PairSubmission } from "../src/types.js"
import type { DocOrderKey } from "../src/transcript.js"

function orderMap(ids: string[]): Map<string, DocOrderKey> {
  // ids listed in document order, one per utterance
  return new Map(ids.map((id, i) => [id, [i, 0, 1, id] as DocOrderKey]))
}

class FakeApi implements SessionApi {
  submissions: PairSubmission[] = []
  failNext = false
  existing: AnnotationRecord[] = []

  async getPairs(): Promise<AnnotationRecord[]> {
    return [...this.existing]
  }

  async submitPair(id: string, submission: PairSubmission): Promise<AnnotationRecord> {
    if (this.failNext) {
      this.failNext = false
      throw new Error("boom")
    }
    this.submissions.push(submission)
    return { conversation: id, ...submission }
  }
}

function makeSession(api = new FakeApi()) {
  const session = new AnnotationSession(api, "c1", "r1", orderMap(["m1", "m2", "m3"]))
  return { session, api }
}

describe("selection", () => {
  it("normalizes click order to document order", () => {
    const { session } = makeSession()
    session.toggle("m3")
    session.toggle("m1")
    expect(session.selectedPair()).toEqual({ antecedent: "m1", anaphor: "m3" })
  })

  it("keeps two slots, dropping the earliest pick on a third click", () => {
    const { session } = makeSession()
    session.toggle("m1")
    session.toggle("m2")
    session.toggle("m3")
    expect(session.selection).toEqual(["m2", "m3"])
    expect(session.selectedPair()).toEqual({ antecedent: "m2", anaphor: "m3" })
  })

  it("toggles an already-selected mention off", () => {
    const { session } = makeSession()
    session.toggle("m1")
    session.toggle("m1")
    expect(session.selection).toEqual([])
  })

  it("blocks submission without exactly two picks", () => {
    const { session } = makeSession()
    expect(session.canSubmit()).toBe(false)
    session.toggle("m2")
    expect(session.canSubmit()).toBe(false)
    session.toggle("m3")
    expect(session.canSubmit()).toBe(true)
  })

  it("rejects unknown mention ids", () => {
    const { session } = makeSession()
    expect(() => session.toggle("zzz")).toThrow(/unknown mention/)
  })
})

describe("submission mirror", () => {
  it("mirrors a record only after the server acknowledges it", async () => {
    const { session, api } = makeSession()
    session.toggle("m1")
    session.toggle("m3")
    const record = await session.submit(true)
    expect(record).toMatchObject({ antecedent: "m1", anaphor: "m3", label: true })
    expect(session.records).toHaveLength(1)
    expect(session.selection).toEqual([])
    expect(api.submissions).toHaveLength(1)
  })

  it("keeps the selection and mirror untouched when the POST fails", async () => {
    const { session, api } = makeSession()
    api.failNext = true
    session.toggle("m1")
    session.toggle("m2")
    await expect(session.submit(false)).rejects.toThrow("boom")
    expect(session.records).toHaveLength(0)
    expect(session.selection).toEqual(["m1", "m2"])
    // the retry goes through
    await session.submit(false)
    expect(session.records).toHaveLength(1)
  })

  it("refuses to submit without a pair", async () => {
    const { session } = makeSession()
    await expect(session.submit(true)).rejects.toThrow(/two distinct mentions/)
  })

  it("shows the latest label per pair when a pair is re-submitted", async () => {
    const { session } = makeSession()
    session.toggle("m1")
    session.toggle("m2")
    await session.submit(true)
    session.toggle("m1")
    session.toggle("m2")
    await session.submit(false)
    expect(session.records).toHaveLength(2)
    const latest = session.latestLabels()
    expect(latest.size).toBe(1)
    expect([...latest.values()][0].label).toBe(false)
  })

  it("restores the mirror from the server log", async () => {
    const api = new FakeApi()
    api.existing = [
      { conversation: "c1", antecedent: "m1", anaphor: "m2", label: true, annotator: "r1" },
    ]
    const { session } = makeSession(api)
    await session.loadExisting()
    expect(session.records).toHaveLength(1)
  })
})
