"""Smoke test for the pappus extension module."""

import math

import pappus


def main():
    nodes = pappus.orbit("default", 2)
    assert len(nodes) == 7, len(nodes)
    assert nodes[0][0] == ""
    assert all(d <= nodes[0][2] + 1e-12 for _, _, d in nodes)

    m, residual, in_sigma = pappus.rho_hat("12")
    assert in_sigma and residual == 0.0
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    assert abs(det - 1.0) < 1e-9, det

    cls, eig = pappus.spectrum_of("12")
    assert cls == "loxodromic", cls
    assert abs(abs(eig[0] * eig[1] * eig[2]) - 1.0) < 1e-9

    points, lines, bound = pappus.sample_curve("default", 6)
    assert len(points) == 2**6 + 1 and len(lines) == len(points)
    assert 0.0 < bound < math.pi / 2

    near = pappus.kulkarni_distance([complex(x) for x in points[10]], "default", 8)
    assert near < 1e-12, near
    far = pappus.kulkarni_distance([1j, 1.0, 0.0], "default", 8)
    assert 0.0 < far <= math.pi / 2

    overall, checks, text = pappus.verify("symmetric", 4, 2)
    assert overall == "degenerate", overall
    assert "line [1,0,0]" in text

    try:
        pappus.orbit("1/0/0", 1)
    except ValueError:
        pass
    else:
        raise AssertionError("bad seed accepted")

    print("smoke test passed:", len(checks), "checks,", len(points), "curve samples")


if __name__ == "__main__":
    main()
