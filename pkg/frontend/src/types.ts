// Shapes mirrored from the service's transcript JSON. The UI never
// recomputes game quantities; it displays these fields verbatim.

export interface SpaceSource {
  type: string;
  space_id: string;
  coords?: number[][];
  width?: number;
  height?: number;
  [key: string]: unknown;
}

export interface FamilyMember {
  space: string;
  points: number[];
}

export interface FamilyPayload {
  family_id: string;
  spaces: SpaceSource[];
  members: FamilyMember[];
  labels?: string[];
}

export interface CertificateMember {
  space: string;
  levels: number[][][];
}

export interface CertificatePayload {
  r: number;
  n: number;
  source: FamilyPayload;
  members: CertificateMember[];
  target: string;
}

export interface TurnPayload {
  turn: number;
  r: number;
  n: number;
  part_count: number;
  mesh: number | string;
  certificate: CertificatePayload;
}

export interface SessionPayload {
  id: number;
  session_id: string;
  bound: number;
  strategy: string;
  max_turns: number;
  status: string;
  stuck_reason: string | null;
  initial_family: FamilyPayload;
  initial_mesh: number | string;
  turns: TurnPayload[];
}

export interface FixtureInfo {
  name: string;
  kind: string;
  points?: number;
  members?: number;
  description: string;
}
