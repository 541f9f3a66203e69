"""Plane geometry helpers for text boxes and OCR quadrilaterals.

Coordinates follow image conventions: x grows right, y grows down. A
positive yaw angle is a counterclockwise rotation on screen, which in
this coordinate system maps an offset (u, v) to (u*cos + v*sin,
-u*sin + v*cos).
"""

from __future__ import annotations

import math

Point = tuple[float, float]


def rotate_about(point: Point, pivot: Point, yaw_deg: float) -> Point:
    """Rotate `point` around `pivot` by `yaw_deg` counterclockwise on screen."""
    c = math.cos(math.radians(yaw_deg))
    s = math.sin(math.radians(yaw_deg))
    u = point[0] - pivot[0]
    v = point[1] - pivot[1]
    return (pivot[0] + u * c + v * s, pivot[1] - u * s + v * c)


def rotated_rect_corners(x: float, y: float, w: float, h: float, yaw_deg: float) -> list[Point]:
    """Corners of the w*h rectangle anchored at (x, y), rotated about that anchor."""
    pivot = (x, y)
    corners = [(x, y), (x + w, y), (x + w, y + h), (x, y + h)]
    if yaw_deg == 0:
        return corners
    return [rotate_about(p, pivot, yaw_deg) for p in corners]


def shoelace_area(points: list[Point]) -> float:
    """Absolute polygon area; degenerate inputs (< 3 points) give 0."""
    n = len(points)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        acc += x1 * y2 - x2 * y1
    return abs(acc) / 2.0


def clip_convex(subject: list[Point], clipper: list[Point]) -> list[Point]:
    """Sutherland-Hodgman clip of a convex `subject` by a convex `clipper`."""
    # Ensure the clipper winds consistently so the inside test is stable.
    if _signed_area(clipper) < 0:
        clipper = list(reversed(clipper))
    output = list(subject)
    n = len(clipper)
    for i in range(n):
        if not output:
            return []
        ax, ay = clipper[i]
        bx, by = clipper[(i + 1) % n]
        input_pts = output
        output = []
        for j in range(len(input_pts)):
            px, py = input_pts[j]
            qx, qy = input_pts[(j - 1) % len(input_pts)]
            p_in = (bx - ax) * (py - ay) - (by - ay) * (px - ax) >= 0
            q_in = (bx - ax) * (qy - ay) - (by - ay) * (qx - ax) >= 0
            if p_in:
                if not q_in:
                    output.append(_intersect((qx, qy), (px, py), (ax, ay), (bx, by)))
                output.append((px, py))
            elif q_in:
                output.append(_intersect((qx, qy), (px, py), (ax, ay), (bx, by)))
    return output


def convex_intersection_area(a: list[Point], b: list[Point]) -> float:
    """Area of the intersection of two convex polygons."""
    return shoelace_area(clip_convex(a, b))


def bounding_rect(points: list[Point]) -> tuple[float, float, float, float]:
    """Axis-aligned (min_x, min_y, max_x, max_y) hull of the points."""
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs), max(ys))


def _signed_area(points: list[Point]) -> float:
    acc = 0.0
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        acc += x1 * y2 - x2 * y1
    return acc / 2.0


def _intersect(p1: Point, p2: Point, a: Point, b: Point) -> Point:
    """Intersection of segment p1-p2 with the infinite line a-b."""
    x1, y1 = p1
    x2, y2 = p2
    x3, y3 = a
    x4, y4 = b
    denom = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4)
    if denom == 0:
        return p2
    t = ((x1 - x3) * (y3 - y4) - (y1 - y3) * (x3 - x4)) / denom
    return (x1 + t * (x2 - x1), y1 + t * (y2 - y1))


def longest_edge_angle(quad: list[Point]) -> float:
    """Screen-counterclockwise angle of the quad's longest edge, in (-90, 90].

    Edge direction is taken modulo 180 degrees because a box edge has no
    inherent orientation.
    """
    best_len = -1.0
    best_angle = 0.0
    n = len(quad)
    for i in range(n):
        x1, y1 = quad[i]
        x2, y2 = quad[(i + 1) % n]
        dx = x2 - x1
        dy = y2 - y1
        length = math.hypot(dx, dy)
        if length > best_len:
            best_len = length
            # y grows down, so the on-screen CCW angle negates dy.
            best_angle = math.degrees(math.atan2(-dy, dx))
    while best_angle > 90.0:
        best_angle -= 180.0
    while best_angle <= -90.0:
        best_angle += 180.0
    return best_angle
