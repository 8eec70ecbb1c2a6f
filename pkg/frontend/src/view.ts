// Pure view-model functions. Every displayed number is copied from the
// payload; nothing here re-derives meshes, scales, or part counts.

import type {
  CertificatePayload,
  SessionPayload,
  SpaceSource,
  TurnPayload,
} from "./types.js";

export interface TurnRow {
  turn: number;
  r: number;
  n: number;
  partCount: number;
  mesh: number | string;
}

export function turnRows(session: SessionPayload): TurnRow[] {
  return session.turns.map((t: TurnPayload) => ({
    turn: t.turn,
    r: t.r,
    n: t.n,
    partCount: t.part_count,
    mesh: t.mesh,
  }));
}

export function statusBanner(session: SessionPayload): string {
  if (session.status === "defender_won") {
    return "Defender won";
  }
  if (session.status === "defender_stuck") {
    return session.stuck_reason
      ? `Defender stuck: ${session.stuck_reason}`
      : "Defender stuck";
  }
  return "In progress";
}

export function challengeEnabled(session: SessionPayload): boolean {
  return session.status === "in_progress";
}

export interface MeshGauge {
  mesh: number | string;
  bound: number;
  // presentation-only bar fill; the displayed numbers are the fields above
  fraction: number;
}

export function meshGauge(session: SessionPayload, turnIndex: number): MeshGauge {
  const mesh =
    turnIndex >= 0 && session.turns.length > turnIndex
      ? session.turns[turnIndex].mesh
      : session.initial_mesh;
  let fraction = 1;
  if (typeof mesh === "number" && mesh > 0) {
    fraction = Math.max(0, Math.min(1, session.bound / mesh));
  }
  return { mesh, bound: session.bound, fraction };
}

const PALETTE = [
  "#4269d0",
  "#efb118",
  "#ff725c",
  "#6cc5b0",
  "#3ca951",
  "#ff8ab7",
  "#a463f2",
  "#97bbf5",
  "#9c6b4e",
  "#9498a0",
];

export function levelColor(level: number): string {
  return PALETTE[level % PALETTE.length];
}

export interface PartView {
  member: number;
  level: number;
  points: number[];
  spaceId: string;
}

export function certificateParts(cert: CertificatePayload): PartView[] {
  const parts: PartView[] = [];
  cert.members.forEach((member, memberIndex) => {
    member.levels.forEach((level, levelIndex) => {
      for (const part of level) {
        parts.push({
          member: memberIndex,
          level: levelIndex,
          points: part,
          spaceId: member.space,
        });
      }
    });
  });
  return parts;
}

export type SceneKind = "1d" | "2d" | "abstract";

export interface PointMark {
  x: number;
  y: number;
  level: number;
  part: number;
}

export interface PartBar {
  part: number;
  level: number;
  size: number;
}

export interface Scene {
  kind: SceneKind;
  width: number;
  height: number;
  points: PointMark[];
  bars: PartBar[];
}

function spaceIndex(cert: CertificatePayload): Map<string, SpaceSource> {
  const map = new Map<string, SpaceSource>();
  for (const src of cert.source.spaces) {
    map.set(src.space_id, src);
  }
  return map;
}

function coordsFor(source: SpaceSource, point: number): number[] | null {
  if (source.type === "points" && source.coords) {
    const c = source.coords[point];
    return c && c.length <= 2 ? c : null;
  }
  if (source.type === "grid" && source.width !== undefined) {
    return [point % source.width, Math.floor(point / source.width)];
  }
  return null;
}

// Renderable scene for the decomposition a turn produced: point fixtures
// in one or two dimensions are drawn to scale, anything else becomes a
// bar per part.
export function turnScene(cert: CertificatePayload): Scene {
  const sources = spaceIndex(cert);
  const parts = certificateParts(cert);
  const marks: PointMark[] = [];
  let drawable = true;
  let maxX = 0;
  let maxY = 0;
  parts.forEach((part, partIndex) => {
    const source = sources.get(part.spaceId);
    for (const p of part.points) {
      const xy = source ? coordsFor(source, p) : null;
      if (!xy) {
        drawable = false;
        return;
      }
      const x = xy[0];
      const y = xy.length > 1 ? xy[1] : 0;
      maxX = Math.max(maxX, x);
      maxY = Math.max(maxY, y);
      marks.push({ x, y, level: part.level, part: partIndex });
    }
  });
  if (drawable && marks.length > 0) {
    return {
      kind: maxY > 0 ? "2d" : "1d",
      width: maxX,
      height: maxY,
      points: marks,
      bars: [],
    };
  }
  return {
    kind: "abstract",
    width: 0,
    height: 0,
    points: [],
    bars: parts.map((part, partIndex) => ({
      part: partIndex,
      level: part.level,
      size: part.points.length,
    })),
  };
}

export function transcriptFilename(session: SessionPayload): string {
  return `session-${session.id}-transcript.json`;
}
