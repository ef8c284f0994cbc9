// Shared wire and configuration types.  OrderSpec is schema-identical to the
// simulator's order config so human and synthetic sessions are interchangeable.

export type ItemSource = 'bin' | 'robot';

export interface OrderItemSpec {
  id: string;
  source: ItemSource;
  /** Robot items: departure offset in seconds, measured from the moment the
   *  robot becomes free (session start for the first delivery). */
  depart_offset_s?: number;
  /** Robot items: travel seconds from departure to the meeting point. */
  travel_s?: number;
}

export interface OrderSpec {
  items: OrderItemSpec[];
}

export interface SurveyItemSpec {
  id: string;
  text: string;
}

export interface GameConfig {
  orders: OrderSpec[];
  telemetry_url: string;
  client_version?: string;
  worker_id?: string;
  survey?: SurveyItemSpec[];
}

export type EventKind =
  | 'OrderStart'
  | 'ItemPacked'
  | 'PackRejected'
  | 'RobotArrived'
  | 'RobotPickedUp'
  | 'OrderSent'
  | 'SessionEnd'
  | 'DragStart'
  | 'DragDrop';

export interface ClientEvent {
  t_ms: number;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export interface SurveyAnswer {
  id: string;
  score: number; // Likert 1..5
}

export interface TelemetryPayload {
  session_id: string;
  worker_id: string;
  client_version: string;
  events: ClientEvent[];
  survey: { items: SurveyAnswer[]; free_text?: string | null } | null;
}
