import { describe, expect, it } from "vitest";

import { ApiClient, ServiceError } from "../src/client.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

interface Deferred {
  resolve: (resp: Response) => void;
  promise: Promise<Response>;
}

function deferred(): Deferred {
  let resolve!: (resp: Response) => void;
  const promise = new Promise<Response>((res) => {
    resolve = res;
  });
  return { resolve, promise };
}

describe("recommend supersession", () => {
  it("a newer request drops the older response", async () => {
    const pending: Deferred[] = [];
    const client = new ApiClient("", () => {
      const d = deferred();
      pending.push(d);
      return d.promise;
    });

    const first = client.recommend({ code: "one" });
    const second = client.recommend({ code: "two" });
    // the old request completes after the new one went out
    pending[0]?.resolve(jsonResponse({ config: "A-B-U", recommendations: [] }));
    pending[1]?.resolve(jsonResponse({ config: "A-B-U", recommendations: ["new"] }));

    expect(await first).toBeNull();
    const fresh = await second;
    expect(fresh?.recommendations).toEqual(["new"]);
  });

  it("a single request resolves normally", async () => {
    const client = new ApiClient("", async () => jsonResponse({ config: "A-B-U" }));
    const got = await client.recommend({ code: "x" });
    expect(got?.config).toBe("A-B-U");
  });
});

describe("error mapping", () => {
  it("service error bodies become typed errors", async () => {
    const client = new ApiClient("", async () =>
      jsonResponse({ error: { code: "empty_code", message: "no APIs" } }, 400),
    );
    await expect(client.recommend({ code: "" })).rejects.toMatchObject({
      name: "ServiceError",
      code: "empty_code",
      status: 400,
    });
  });

  it("non-JSON failures fall back to the status", async () => {
    const client = new ApiClient("", async () => new Response("boom", { status: 502 }));
    const err = await client.action("a1").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect((err as ServiceError).code).toBe("http_error");
    expect((err as ServiceError).status).toBe(502);
  });
});

describe("endpoint paths", () => {
  it("hits the documented routes and unwraps the hierarchy envelope", async () => {
    const calls: string[] = [];
    const client = new ApiClient("http://svc", async (input) => {
      calls.push(input);
      if (input.endsWith("/api/hierarchy/a1")) {
        return jsonResponse({ hierarchy: [{ action_id: "a1", children: [] }] });
      }
      return jsonResponse({});
    });
    const forest = await client.hierarchy("a1");
    expect(forest[0]?.action_id).toBe("a1");
    await client.action("a2");
    await client.stats();
    await client.recommend({ selection: "Window" });
    expect(calls).toEqual([
      "http://svc/api/hierarchy/a1",
      "http://svc/api/action/a2",
      "http://svc/api/stats",
      "http://svc/api/recommend",
    ]);
  });
});
