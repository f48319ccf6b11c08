/** Wire types for the /v1 API. Field names mirror the server JSON exactly. */

export interface TopicRow {
  id: number;
  label: string;
  keywords: [string, number][];
  memberClasses: string[];
  parentTopicId: number | null;
  size: number;
}

export interface TopicsResponse {
  topics: TopicRow[];
  roots: number[];
}

export interface Suggestion {
  propertyIri: string;
  label: string;
  score: number;
  prevalence: number | null;
  domainClass: string;
  rangeClassOrDatatype: string;
  kind: "object" | "datatype";
}

export interface SuggestionsResponse {
  suggestions: Suggestion[];
}

export interface LiteralJson {
  lexical: string;
  datatypeIri: string;
  languageTag: string | null;
}

export interface ConstraintJson {
  propertyIri: string;
  operator: string;
  operand: LiteralJson;
}

export interface NodeJson {
  nodeId: number;
  classIri: string;
  constraints: ConstraintJson[];
}

export interface EdgeJson {
  sourceNodeId: number;
  targetNodeId: number;
  propertyIri: string;
}

/** Canonical prototype-graph JSON; the single source of editor state. */
export interface GraphJson {
  nodes: NodeJson[];
  edges: EdgeJson[];
  rootNodeId: number;
}

export interface Diagnostic {
  code: string;
  element: Record<string, unknown>;
  message: string;
}

export interface ValidateResponse {
  valid: boolean;
  diagnostics: Diagnostic[];
}

export interface InstanceJson {
  nodeAssignments: Record<string, string>;
  constraintValues: { nodeId: number; index: number; value: LiteralJson }[];
  displayLabels: Record<string, string>;
}

export interface ExecuteResponse {
  query: { text: string; limit: number; offset: number };
  count: number;
  instances: InstanceJson[];
}

export interface CircleJson {
  classIri: string;
  x: number;
  y: number;
  radius: number;
  depth: number;
}

export interface MinimapResponse {
  rootIri: string;
  circles: CircleJson[];
}

export interface HighlightResponse {
  highlights: { classIri: string; circle: CircleJson }[];
}

export interface ApiErrorBody {
  httpStatus: number;
  code: string;
  message: string;
  details: Record<string, unknown>;
}
