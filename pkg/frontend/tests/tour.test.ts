import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { TourPlayer } from "../src/tour";
import { Waypoint } from "../src/protocol";

const waypoints: Waypoint[] = [
  { x: 10, y: 30, heading: 0 },
  { x: 20, y: 30, heading: 0 },
  { x: 30, y: 30, heading: 90 },
  { x: 30, y: 40, heading: 90 },
  { x: 30, y: 50, heading: 90 },
];

beforeEach(() => vi.useFakeTimers());
afterEach(() => vi.useRealTimers());

describe("TourPlayer", () => {
  it("plays every waypoint in order and signals completion once", () => {
    const frames: number[] = [];
    let completed = 0;
    const tour = new TourPlayer(waypoints, {
      secondsPerWaypoint: 1,
      onFrame: (f) => frames.push(f.waypointIndex),
      onComplete: () => completed++,
    });
    tour.start();
    vi.advanceTimersByTime(10_000);
    expect(frames).toEqual([0, 1, 2, 3, 4]);
    expect(completed).toBe(1);
    expect(tour.status).toBe("done");
  });

  it("pause at waypoint 3 sweeps 360 degrees at 20 deg/s then resumes there", () => {
    const frames: { waypointIndex: number; heading: number; panorama: boolean }[] = [];
    const tour = new TourPlayer(waypoints, {
      secondsPerWaypoint: 1,
      onFrame: (f) => frames.push(f),
    });
    tour.start();
    vi.advanceTimersByTime(3_000); // now at waypoint 3
    expect(tour.currentWaypoint).toBe(3);
    const panorama = tour.pause();
    expect(panorama).toEqual({
      waypoint_index: 3,
      sweep_degrees: 360,
      rate_deg_per_s: 20,
    });
    frames.length = 0;
    vi.advanceTimersByTime(18_000); // 360 / 20 deg/s
    const sweep = frames.filter((f) => f.panorama);
    expect(sweep.length).toBe(36);
    expect(sweep.every((f) => f.waypointIndex === 3)).toBe(true);
    // full revolution: ends back at the waypoint heading
    expect(sweep[sweep.length - 1].heading).toBe(waypoints[3].heading);
    // no forward motion while paused
    expect(frames.some((f) => !f.panorama)).toBe(false);

    const resumedAt = tour.resume();
    expect(resumedAt).toBe(3);
    vi.advanceTimersByTime(2_000);
    expect(tour.status).toBe("done");
  });

  it("rejects an empty waypoint list", () => {
    expect(() => new TourPlayer([])).toThrow(/no waypoints/);
  });

  it("cannot pause before starting or resume while playing", () => {
    const tour = new TourPlayer(waypoints);
    expect(() => tour.pause()).toThrow(/cannot pause/);
    tour.start();
    expect(() => tour.resume()).toThrow(/cannot resume/);
  });
});
