/**
 * Scripted egocentric tour playback.
 *
 * The camera rides past the neighborhood waypoint by waypoint. The
 * participant may pause at any point; a pause sweeps the camera yaw
 * through a full 360° panorama at a slow fixed rate, then playback
 * resumes at the paused waypoint. Completion emits a single callback.
 */

import { Panorama, Waypoint } from "./protocol";

export const DEFAULT_PANORAMA_RATE_DEG_PER_S = 20;

export interface CameraFrame {
  x: number;
  y: number;
  heading: number;
  waypointIndex: number;
  panorama: boolean;
}

export interface TourOptions {
  secondsPerWaypoint?: number;
  panoramaRateDegPerS?: number;
  onFrame?: (frame: CameraFrame) => void;
  onComplete?: () => void;
}

type TimerId = ReturnType<typeof setTimeout>;

export class TourPlayer {
  readonly waypoints: Waypoint[];
  private secondsPerWaypoint: number;
  private panoramaRate: number;
  private onFrame: (frame: CameraFrame) => void;
  private onComplete: () => void;
  private index = 0;
  private timer: TimerId | null = null;
  private state: "idle" | "playing" | "paused" | "done" = "idle";

  constructor(waypoints: Waypoint[], options: TourOptions = {}) {
    if (!waypoints || waypoints.length === 0) {
      throw new Error("tour has no waypoints");
    }
    this.waypoints = waypoints;
    this.secondsPerWaypoint = options.secondsPerWaypoint ?? 1;
    this.panoramaRate =
      options.panoramaRateDegPerS ?? DEFAULT_PANORAMA_RATE_DEG_PER_S;
    this.onFrame = options.onFrame ?? (() => {});
    this.onComplete = options.onComplete ?? (() => {});
  }

  get status(): string {
    return this.state;
  }

  get currentWaypoint(): number {
    return this.index;
  }

  start(): void {
    if (this.state !== "idle") throw new Error(`cannot start from ${this.state}`);
    this.state = "playing";
    this.emitWaypoint();
    this.scheduleNext();
  }

  /**
   * Halt motion and sweep a full panorama at the current waypoint.
   * Returns the panorama descriptor the client reports to the service.
   */
  pause(): Panorama {
    if (this.state !== "playing") throw new Error(`cannot pause from ${this.state}`);
    this.clearTimer();
    this.state = "paused";
    const sweepSeconds = 360 / this.panoramaRate;
    const w = this.waypoints[this.index];
    // one frame per 10° of sweep keeps the rendering cost bounded
    const steps = 36;
    for (let i = 1; i <= steps; i++) {
      const heading = (w.heading + (360 * i) / steps) % 360;
      setTimeout(
        () =>
          this.onFrame({
            x: w.x,
            y: w.y,
            heading,
            waypointIndex: this.index,
            panorama: true,
          }),
        (sweepSeconds * 1000 * i) / steps
      );
    }
    return {
      waypoint_index: this.index,
      sweep_degrees: 360,
      rate_deg_per_s: this.panoramaRate,
    };
  }

  /** Resume playback at the paused waypoint; returns that index. */
  resume(): number {
    if (this.state !== "paused") throw new Error(`cannot resume from ${this.state}`);
    this.state = "playing";
    this.emitWaypoint();
    this.scheduleNext();
    return this.index;
  }

  stop(): void {
    this.clearTimer();
    this.state = "done";
  }

  private emitWaypoint(): void {
    const w = this.waypoints[this.index];
    this.onFrame({
      x: w.x,
      y: w.y,
      heading: w.heading,
      waypointIndex: this.index,
      panorama: false,
    });
  }

  private scheduleNext(): void {
    this.timer = setTimeout(() => {
      if (this.state !== "playing") return;
      if (this.index + 1 >= this.waypoints.length) {
        this.state = "done";
        this.onComplete();
        return;
      }
      this.index += 1;
      this.emitWaypoint();
      this.scheduleNext();
    }, this.secondsPerWaypoint * 1000);
  }

  private clearTimer(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }
}
