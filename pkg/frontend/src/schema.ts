// Client-side payload validation, mirroring the service schema, so a payload
// is known-good before it ever leaves the browser.

import type { TelemetryPayload } from './types.js';

const KINDS = new Set([
  'OrderStart', 'ItemPacked', 'PackRejected', 'RobotArrived', 'RobotPickedUp',
  'OrderSent', 'SessionEnd', 'DragStart', 'DragDrop',
]);

export function validatePayload(payload: TelemetryPayload): string[] {
  const errors: string[] = [];
  if (!payload.session_id) errors.push('session_id must be nonempty');
  if (!payload.worker_id) errors.push('worker_id must be nonempty');
  if (!payload.client_version) errors.push('client_version must be nonempty');
  if (!Array.isArray(payload.events)) {
    errors.push('events must be an array');
    return errors;
  }
  let last = -Infinity;
  payload.events.forEach((e, i) => {
    if (!Number.isInteger(e.t_ms) || e.t_ms < 0) {
      errors.push(`events[${i}].t_ms must be a nonnegative integer`);
    }
    if (e.t_ms < last) errors.push(`events[${i}] breaks time monotonicity`);
    last = e.t_ms;
    if (!KINDS.has(e.kind)) errors.push(`events[${i}].kind ${e.kind} unknown`);
    if (typeof e.payload !== 'object' || e.payload === null) {
      errors.push(`events[${i}].payload must be an object`);
    }
  });
  if (payload.survey) {
    payload.survey.items.forEach((item, i) => {
      if (!item.id) errors.push(`survey.items[${i}].id must be nonempty`);
      if (!Number.isInteger(item.score) || item.score < 1 || item.score > 5) {
        errors.push(`survey.items[${i}].score must be an integer in 1..5`);
      }
    });
  }
  return errors;
}
