// Dataset wire types, matching the exporter's JSON layout field by field.

export interface BBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface MetaNode {
  id: string;
  label: string;
  x: number;
  y: number;
  z: number; // exponent: first appears in layer z
}

export interface Meta {
  format: string;
  bbox: BBox;
  layer_count: number;
  qn: number;
  qr: number;
  node_radius: number[];
  initial_radius: number;
  snap_eps: number;
  tile_px: number;
  hint_threshold: number;
  forced_final: boolean;
  nodes: MetaNode[];
  edges: [number, number][];
  order: number[];
}

export interface LayerNode {
  id: number;
  label: string;
  x: number;
  y: number;
  z: number;
}

export interface Rail {
  id: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  z: number;
  max: number;
  edges: number[];
  top_edge: number | null;
}

export interface LabelItem {
  id: number;
  level: number;
  side: "left" | "right" | "above" | "below";
}

export interface Labels {
  font_height: number;
  char_width_ratio: number;
  delta0: number;
  delta: number;
  items: LabelItem[];
}

export interface EdgeRoute {
  level: number;
  points: [number, number][];
}

export interface Dataset {
  meta: Meta;
  layers: { nodes: LayerNode[]; rails: Rail[] }[];
  labels: Labels;
  routes: Record<string, EdgeRoute>;
}

export interface Viewport {
  x: number;
  y: number;
  w: number;
  h: number;
}
