import type { ConstraintJson, GraphJson, LiteralJson, Suggestion } from "./types";

const XSD = "http://www.w3.org/2001/XMLSchema#";

export function localName(iri: string): string {
  const hash = iri.lastIndexOf("#");
  const slash = iri.lastIndexOf("/");
  return iri.slice(Math.max(hash, slash) + 1) || iri;
}

/** Seed a two-node graph from a start-link suggestion. */
export function graphFromStartLink(link: Suggestion): GraphJson {
  return {
    nodes: [
      { nodeId: 0, classIri: link.domainClass, constraints: [] },
      { nodeId: 1, classIri: link.rangeClassOrDatatype, constraints: [] },
    ],
    edges: [{ sourceNodeId: 0, targetNodeId: 1, propertyIri: link.propertyIri }],
    rootNodeId: 0,
  };
}

/**
 * Expansion always appends a fresh leaf reached from an existing node, so
 * no affordance can ever close a cycle: the editor is tree-shaped by
 * construction.
 */
export function expandWithLink(graph: GraphJson, sourceNodeId: number, link: Suggestion): GraphJson {
  const newId = graph.nodes.length;
  return {
    nodes: [...graph.nodes, { nodeId: newId, classIri: link.rangeClassOrDatatype, constraints: [] }],
    edges: [
      ...graph.edges,
      { sourceNodeId, targetNodeId: newId, propertyIri: link.propertyIri },
    ],
    rootNodeId: graph.rootNodeId,
  };
}

export function addConstraintTo(
  graph: GraphJson,
  nodeId: number,
  constraint: ConstraintJson,
): GraphJson {
  return {
    ...graph,
    nodes: graph.nodes.map((node) =>
      node.nodeId === nodeId
        ? { ...node, constraints: [...node.constraints, constraint] }
        : node,
    ),
  };
}

export function removeConstraintFrom(graph: GraphJson, nodeId: number, index: number): GraphJson {
  return {
    ...graph,
    nodes: graph.nodes.map((node) =>
      node.nodeId === nodeId
        ? { ...node, constraints: node.constraints.filter((_, i) => i !== index) }
        : node,
    ),
  };
}

/** Remove a non-root leaf node and renumber ids densely, as the API does. */
export function removeLeafNode(graph: GraphJson, nodeId: number): GraphJson {
  const degree = graph.edges.filter(
    (e) => e.sourceNodeId === nodeId || e.targetNodeId === nodeId,
  ).length;
  if (nodeId === graph.rootNodeId || degree > 1) return graph;
  const remap = new Map<number, number>();
  const nodes = graph.nodes
    .filter((n) => n.nodeId !== nodeId)
    .map((node, i) => {
      remap.set(node.nodeId, i);
      return { ...node, nodeId: i };
    });
  const edges = graph.edges
    .filter((e) => e.sourceNodeId !== nodeId && e.targetNodeId !== nodeId)
    .map((e) => ({
      sourceNodeId: remap.get(e.sourceNodeId)!,
      targetNodeId: remap.get(e.targetNodeId)!,
      propertyIri: e.propertyIri,
    }));
  return { nodes, edges, rootNodeId: remap.get(graph.rootNodeId)! };
}

export interface OperandExpansion {
  literal: LiteralJson;
  /** set when the input was widened, e.g. a bare year; shown as a chip */
  expandedFrom: string | null;
}

/**
 * Turn raw constraint input into a typed literal for the property's range.
 * A bare year against a date range expands to Jan 1 with a visible note.
 */
export function expandOperand(raw: string, rangeIri: string): OperandExpansion {
  const trimmed = raw.trim();
  if (rangeIri === XSD + "date" && /^\d{4}$/.test(trimmed)) {
    return {
      literal: { lexical: `${trimmed}-01-01`, datatypeIri: XSD + "date", languageTag: null },
      expandedFrom: trimmed,
    };
  }
  if (rangeIri.startsWith(XSD)) {
    return {
      literal: { lexical: trimmed, datatypeIri: rangeIri, languageTag: null },
      expandedFrom: null,
    };
  }
  return {
    literal: { lexical: trimmed, datatypeIri: XSD + "string", languageTag: null },
    expandedFrom: null,
  };
}

export const OPERATORS_BY_RANGE: Record<string, string[]> = {
  [XSD + "date"]: [">", ">=", "<", "<=", "=", "!="],
  [XSD + "dateTime"]: [">", ">=", "<", "<=", "=", "!="],
  [XSD + "integer"]: [">", ">=", "<", "<=", "=", "!="],
  [XSD + "decimal"]: [">", ">=", "<", "<=", "=", "!="],
  [XSD + "double"]: [">", ">=", "<", "<=", "=", "!="],
  [XSD + "string"]: ["contains", "=", "!="],
};

export function operatorsFor(rangeIri: string): string[] {
  return OPERATORS_BY_RANGE[rangeIri] ?? ["=", "!="];
}
