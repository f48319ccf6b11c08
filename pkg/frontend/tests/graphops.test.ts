import { describe, expect, it } from "vitest";

import {
  expandOperand,
  expandWithLink,
  graphFromStartLink,
  removeLeafNode,
} from "../src/graphops";
import type { Suggestion } from "../src/types";

const XSD = "http://www.w3.org/2001/XMLSchema#";

const authorLink: Suggestion = {
  propertyIri: "http://example.org/onto/author",
  label: "author",
  score: 0.5,
  prevalence: 90,
  domainClass: "http://example.org/onto/Person",
  rangeClassOrDatatype: "http://example.org/onto/Work",
  kind: "object",
};

function isTree(graph: ReturnType<typeof graphFromStartLink>): boolean {
  const n = graph.nodes.length;
  if (graph.edges.length !== n - 1) return false;
  const adjacency = new Map<number, number[]>();
  for (const node of graph.nodes) adjacency.set(node.nodeId, []);
  for (const edge of graph.edges) {
    adjacency.get(edge.sourceNodeId)!.push(edge.targetNodeId);
    adjacency.get(edge.targetNodeId)!.push(edge.sourceNodeId);
  }
  const seen = new Set([graph.rootNodeId]);
  const queue = [graph.rootNodeId];
  while (queue.length > 0) {
    for (const next of adjacency.get(queue.shift()!) ?? []) {
      if (!seen.has(next)) {
        seen.add(next);
        queue.push(next);
      }
    }
  }
  return seen.size === n;
}

describe("graph operations stay tree-shaped by construction", () => {
  it("start link seeds a two-node tree", () => {
    const graph = graphFromStartLink(authorLink);
    expect(graph.nodes).toHaveLength(2);
    expect(isTree(graph)).toBe(true);
  });

  it("any expansion sequence keeps the tree invariant", () => {
    let graph = graphFromStartLink(authorLink);
    for (let i = 0; i < 6; i++) {
      graph = expandWithLink(graph, i % graph.nodes.length, authorLink);
      expect(isTree(graph)).toBe(true);
    }
    expect(graph.nodes.map((n) => n.nodeId)).toEqual([0, 1, 2, 3, 4, 5, 6, 7]);
  });

  it("leaf removal renumbers densely and refuses non-leaves", () => {
    let graph = graphFromStartLink(authorLink);
    graph = expandWithLink(graph, 1, authorLink); // chain 0-1-2
    expect(removeLeafNode(graph, 1)).toBe(graph); // internal: refused
    expect(removeLeafNode(graph, 0)).toBe(graph); // root: refused
    const trimmed = removeLeafNode(graph, 2);
    expect(trimmed.nodes.map((n) => n.nodeId)).toEqual([0, 1]);
    expect(isTree(trimmed)).toBe(true);
  });
});

describe("operand expansion", () => {
  it("expands a bare year against a date range, with the original kept", () => {
    const expanded = expandOperand("1989", XSD + "date");
    expect(expanded.literal).toEqual({
      lexical: "1989-01-01",
      datatypeIri: XSD + "date",
      languageTag: null,
    });
    expect(expanded.expandedFrom).toBe("1989");
  });

  it("passes full dates and non-date ranges through unchanged", () => {
    expect(expandOperand("1989-07-14", XSD + "date").expandedFrom).toBeNull();
    expect(expandOperand("1989", XSD + "integer")).toEqual({
      literal: { lexical: "1989", datatypeIri: XSD + "integer", languageTag: null },
      expandedFrom: null,
    });
  });
});
