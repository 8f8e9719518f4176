/** Idle detection: a recommendation request fires once the developer has
 * stopped editing for IDLE_MS. Every edit resets the countdown, so a stream
 * of edits closer together than the interval never fires. */

export const IDLE_MS = 5000;

export class IdleTrigger {
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly fire: () => void,
    private readonly idleMs: number = IDLE_MS,
  ) {}

  /** Call on every edit. Restarts the idle countdown. */
  edit(): void {
    this.cancel();
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire();
    }, this.idleMs);
  }

  /** Drop any pending countdown (used when a request fires explicitly). */
  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  get pending(): boolean {
    return this.timer !== null;
  }
}
