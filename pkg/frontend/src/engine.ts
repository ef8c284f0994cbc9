// Game state machine, independent of the DOM so scripted sessions can drive
// it headlessly.  All timestamps come from one injected monotonic clock and
// are logged in whole milliseconds since session start.

import type {
  ClientEvent,
  EventKind,
  GameConfig,
  OrderItemSpec,
  SurveyAnswer,
  TelemetryPayload,
} from './types.js';

export type DropResult = 'accepted' | 'rejected';

interface RobotState {
  /** Flat index into the robot delivery sequence across all orders. */
  deliveryIndex: number;
  carrying: OrderItemSpec | null;
  arrivesAtMs: number | null; // null: no deliveries left
  arrived: boolean;
}

function randomSessionId(): string {
  const bytes = new Uint8Array(12);
  if (typeof crypto !== 'undefined' && crypto.getRandomValues) {
    crypto.getRandomValues(bytes);
  } else {
    for (let i = 0; i < bytes.length; i++) bytes[i] = Math.floor(Math.random() * 256);
  }
  return 'game-' + Array.from(bytes, (b) => b.toString(16).padStart(2, '0')).join('');
}

export class GameEngine {
  readonly events: ClientEvent[] = [];
  readonly sessionId: string;

  private readonly config: GameConfig;
  private readonly now: () => number;
  private readonly originMs: number;
  private readonly deliveries: OrderItemSpec[];

  private orderIndex = 0;
  private packedInOrder = 0;
  private started = false;
  private finished = false;

  /** Robot items that were picked up and are available to pack. */
  private readonly availableRobotItems = new Set<string>();
  private robot: RobotState;

  /** Client-side order timers: start/stop clock readings per order. */
  private readonly timerStartMs: number[] = [];
  private readonly timerStopMs: number[] = [];

  constructor(config: GameConfig, clock?: () => number, sessionId?: string) {
    if (!config.orders.length) throw new Error('config needs at least one order');
    for (const order of config.orders) {
      if (!order.items.length) throw new Error('every order needs at least one item');
    }
    this.config = config;
    this.now = clock ?? (() => performance.now());
    this.originMs = this.now();
    this.sessionId = sessionId ?? randomSessionId();
    this.deliveries = config.orders.flatMap((o) =>
      o.items.filter((it) => it.source === 'robot'),
    );
    this.robot = { deliveryIndex: 0, carrying: null, arrivesAtMs: null, arrived: false };
  }

  // -- clock and event log ---------------------------------------------------

  /** Whole milliseconds since session start; never decreases. */
  elapsedMs(): number {
    return Math.max(0, Math.round(this.now() - this.originMs));
  }

  private log(kind: EventKind, payload: Record<string, unknown>, tMs?: number): number {
    const t = tMs ?? this.elapsedMs();
    const last = this.events.length ? this.events[this.events.length - 1].t_ms : 0;
    const clamped = Math.max(t, last); // monotonic even if the host clock hiccups
    this.events.push({ t_ms: clamped, kind, payload });
    return clamped;
  }

  // -- session flow ------------------------------------------------------------

  start(): void {
    if (this.started) return;
    this.started = true;
    const t = this.log('OrderStart', { order: 0 });
    this.timerStartMs.push(t);
    this.scheduleNextDelivery(t);
  }

  get currentOrder(): number {
    return this.orderIndex;
  }

  get isFinished(): boolean {
    return this.finished;
  }

  /** Item ids already in the box for the current order. */
  get boxContents(): string[] {
    const items = this.config.orders[this.orderIndex]?.items ?? [];
    return items.slice(0, this.packedInOrder).map((it) => it.id);
  }

  get expectedItem(): OrderItemSpec | null {
    const items = this.config.orders[this.orderIndex]?.items ?? [];
    return this.packedInOrder < items.length ? items[this.packedInOrder] : null;
  }

  get orderComplete(): boolean {
    return this.started && !this.finished && this.expectedItem === null;
  }

  /** Items the player can currently drag: bins always, robot items once picked up. */
  isAvailable(itemId: string): boolean {
    const order = this.config.orders[this.orderIndex];
    if (!order) return false;
    const spec = order.items.find((it) => it.id === itemId);
    if (!spec) return false;
    return spec.source === 'bin' || this.availableRobotItems.has(itemId);
  }

  logDragStart(itemId: string): void {
    this.log('DragStart', { order: this.orderIndex, item: itemId });
  }

  /**
   * Drop an item on the box.  Accepted only when it is the next item in the
   * order's sequence (and, for robot items, already picked up); otherwise the
   * item fails to pack, returns to the staging area, and the rejection is
   * logged.  Box state never changes on a reject.
   */
  dropOnBox(itemId: string): DropResult {
    if (!this.started || this.finished) return 'rejected';
    this.log('DragDrop', { order: this.orderIndex, item: itemId });
    const expected = this.expectedItem;
    if (expected === null || expected.id !== itemId || !this.isAvailable(itemId)) {
      this.log('PackRejected', { order: this.orderIndex, item: itemId });
      return 'rejected';
    }
    this.packedInOrder += 1;
    this.log('ItemPacked', { order: this.orderIndex, item: itemId });
    return 'accepted';
  }

  /** The player clicks "send"; only a correctly filled box goes out. */
  send(): boolean {
    if (!this.orderComplete) return false;
    const t = this.log('OrderSent', { order: this.orderIndex });
    this.timerStopMs.push(t);
    this.availableRobotItems.clear();
    this.orderIndex += 1;
    this.packedInOrder = 0;
    if (this.orderIndex >= this.config.orders.length) {
      this.finished = true;
      this.log('SessionEnd', {}, t);
    } else {
      this.log('OrderStart', { order: this.orderIndex }, t);
      this.timerStartMs.push(t);
    }
    return true;
  }

  // -- robot -------------------------------------------------------------------

  private scheduleNextDelivery(freeAtMs: number): void {
    const item = this.deliveries[this.robot.deliveryIndex];
    if (!item) {
      this.robot = { ...this.robot, carrying: null, arrivesAtMs: null, arrived: false };
      return;
    }
    const departMs = freeAtMs + Math.round((item.depart_offset_s ?? 0) * 1000);
    const arriveMs = departMs + Math.round((item.travel_s ?? 0) * 1000);
    this.robot = {
      deliveryIndex: this.robot.deliveryIndex,
      carrying: item,
      arrivesAtMs: arriveMs,
      arrived: false,
    };
  }

  /** When the pending delivery is due; null when the robot is done. */
  get robotArrivesAtMs(): number | null {
    return this.robot.arrived ? null : this.robot.arrivesAtMs;
  }

  get robotWaiting(): boolean {
    return this.robot.arrived;
  }

  get robotCarrying(): string | null {
    return this.robot.carrying?.id ?? null;
  }

  /**
   * Drive the robot forward to the current clock reading.  Call from a UI
   * timer (or a test script); logs RobotArrived once the pending delivery's
   * arrival time has passed.  Idempotent.
   */
  advanceRobot(): void {
    if (this.robot.arrived || this.robot.arrivesAtMs === null || !this.started) return;
    const arriveMs = this.robot.arrivesAtMs;
    if (this.elapsedMs() >= arriveMs) {
      this.robot = { ...this.robot, arrived: true };
      this.log('RobotArrived', { item: this.robot.carrying!.id }, arriveMs);
    }
  }

  /**
   * The pickup affordance: enabled only while the robot waits at the meeting
   * point.  Picking up releases the robot for its next scheduled departure.
   */
  pickupRobotItem(): boolean {
    this.advanceRobot();
    if (!this.robot.arrived || !this.robot.carrying) return false;
    const item = this.robot.carrying;
    const t = this.log('RobotPickedUp', { item: item.id });
    this.availableRobotItems.add(item.id);
    this.robot = {
      deliveryIndex: this.robot.deliveryIndex + 1,
      carrying: null,
      arrivesAtMs: null,
      arrived: false,
    };
    this.scheduleNextDelivery(t);
    return true;
  }

  // -- timers and payload --------------------------------------------------------

  /** The client's own per-order timer readings, in milliseconds. */
  orderTimersMs(): number[] {
    return this.timerStopMs.map((stop, i) => stop - this.timerStartMs[i]);
  }

  overallTimerMs(): number | null {
    if (!this.finished) return null;
    return this.timerStopMs[this.timerStopMs.length - 1] - this.timerStartMs[0];
  }

  buildPayload(survey: SurveyAnswer[] | null, freeText?: string): TelemetryPayload {
    return {
      session_id: this.sessionId,
      worker_id: this.config.worker_id ?? 'anonymous',
      client_version: this.config.client_version ?? 'game-0.1.0',
      events: [...this.events],
      survey: survey ? { items: survey, free_text: freeText ?? null } : null,
    };
  }
}
