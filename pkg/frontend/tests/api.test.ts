import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, NetworkError } from "../src/api.js";
import { FakeServer, makeDialogues } from "./fake_server.js";

describe("ApiClient", () => {
  it("returns null when the sample queue is drained (204)", async () => {
    const server = new FakeServer([]);
    const client = new ApiClient("", server.fetch);
    expect(await client.next("ada")).toBeNull();
  });

  it("returns the first unscored sample with its flags", async () => {
    const server = new FakeServer(makeDialogues(3, [0]));
    const client = new ApiClient("", server.fetch);
    const sample = await client.next("ada");
    expect(sample).not.toBeNull();
    expect(sample!.dialogue_id).toBe("dlg-000");
    expect(sample!.position).toBe(0);
    expect(sample!.total).toBe(3);
    expect(sample!.flags).toHaveLength(1);
    expect(sample!.flags[0]!.dimension).toBe("UndefinedFunctionCall");
  });

  it("URL-encodes the annotator name", async () => {
    const server = new FakeServer(makeDialogues(1));
    const client = new ApiClient("", server.fetch);
    await client.next("a b&c");
    expect(server.requests[0]!.path).toBe("/api/samples/next");
  });

  it("maps 201 to a created outcome carrying the position", async () => {
    const server = new FakeServer(makeDialogues(2));
    const client = new ApiClient("", server.fetch);
    const outcome = await client.postScore({
      dialogue_id: "dlg-001",
      annotator: "ada",
      score: 1,
      feedback: "",
    });
    expect(outcome).toEqual({ kind: "created", position: 1 });
    expect(server.scoreFor("dlg-001")).toEqual({
      annotator: "ada",
      score: 1,
      feedback: "",
    });
  });

  it("maps 409 to a duplicate outcome instead of throwing", async () => {
    const server = new FakeServer(makeDialogues(1));
    const client = new ApiClient("", server.fetch);
    const payload = {
      dialogue_id: "dlg-000",
      annotator: "ada",
      score: 1 as const,
      feedback: "",
    };
    await client.postScore(payload);
    const second = await client.postScore(payload);
    expect(second.kind).toBe("duplicate");
    if (second.kind === "duplicate") {
      expect(second.message).toContain("already scored");
    }
  });

  it("maps 422 to an invalid outcome carrying the server detail", async () => {
    const server = new FakeServer(makeDialogues(1));
    const client = new ApiClient("", server.fetch);
    const outcome = await client.postScore({
      dialogue_id: "dlg-000",
      annotator: "ada",
      score: 0,
      feedback: "   ",
    });
    expect(outcome.kind).toBe("invalid");
    if (outcome.kind === "invalid") {
      expect(outcome.message).toContain("feedback");
    }
    expect(server.scores.size).toBe(0);
  });

  it("throws ApiError with the status for other failures", async () => {
    const server = new FakeServer(makeDialogues(1));
    const client = new ApiClient("", server.fetch);
    await expect(
      client.postScore({
        dialogue_id: "dlg-999",
        annotator: "ada",
        score: 1,
        feedback: "",
      }),
    ).rejects.toSatisfy((err) => err instanceof ApiError && err.status === 404);
  });

  it("wraps a rejected fetch in NetworkError", async () => {
    const server = new FakeServer(makeDialogues(1));
    server.offline = true;
    const client = new ApiClient("", server.fetch);
    await expect(client.next("ada")).rejects.toBeInstanceOf(NetworkError);
  });

  it("joins base URLs without doubling slashes", async () => {
    const seen: string[] = [];
    const client = new ApiClient("http://svc.test/", async (url) => {
      seen.push(url);
      return {
        status: 200,
        ok: true,
        statusText: "OK",
        json: async () => ({ status: "ok", sampled: 0 }),
      };
    });
    await client.health();
    expect(seen).toEqual(["http://svc.test/api/health"]);
  });

  it("fetches the summary shape unchanged", async () => {
    const server = new FakeServer(makeDialogues(4, [1, 2]));
    const client = new ApiClient("", server.fetch);
    await client.postScore({
      dialogue_id: "dlg-000",
      annotator: "ada",
      score: 0,
      feedback: "wrong city",
    });
    const summary = await client.summary();
    expect(summary.sampled).toBe(4);
    expect(summary.scored).toBe(1);
    expect(summary.human_error_rate).toBe(1);
    expect(summary.dimension_counts).toEqual({ UndefinedFunctionCall: 2 });
    expect(summary.feedback).toEqual(["wrong city"]);
    expect(summary.annotators).toEqual(["ada"]);
  });
});
