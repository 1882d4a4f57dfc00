import numpy as np
import pytest

import segvec


def three_rectangles():
    img = np.ones((64, 64, 3))
    img[8:28, 6:30] = [0.85, 0.15, 0.15]
    img[6:40, 34:58] = [0.15, 0.35, 0.8]
    img[38:58, 12:44] = [0.2, 0.7, 0.25]
    return img


def square_doc():
    pts = []
    corners = [(8, 8), (24, 8), (24, 24), (8, 24)]
    for i, a in enumerate(corners):
        b = corners[(i + 1) % 4]
        for t in (0, 1 / 3, 2 / 3):
            pts.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return segvec.VectorDocument(32, 32, [segvec.BezierPath(pts, [0.0, 0.0, 0.0])])


def test_kernel_matches_disc():
    k = segvec.make_circular_kernel(3)
    yy, xx = np.mgrid[-3:4, -3:4]
    assert (k == (xx**2 + yy**2 <= 9)).all()


def test_render_square():
    img = segvec.render(square_doc())
    assert img.shape == (32, 32, 3)
    assert img[16, 16].tolist() == [0.0, 0.0, 0.0]
    assert img[2, 2].tolist() == [1.0, 1.0, 1.0]
    assert segvec.stats(square_doc())["parameters"] == 27


def test_svg_round_trip(tmp_path):
    doc = square_doc()
    path = tmp_path / "sq.svg"
    segvec.write_svg(doc, path)
    back = segvec.read_svg(path)
    assert (back.width, back.height) == (32, 32)
    assert np.abs(np.array(back.paths[0].points) - np.array(doc.paths[0].points)).max() < 0.005
    assert back.paths[0].fill == doc.paths[0].fill
    again = segvec.parse_svg(segvec.to_svg(back))
    assert again == back


def test_bad_svg_raises():
    with pytest.raises(ValueError):
        segvec.parse_svg("<svg")


def test_segment_filter_trace():
    img = three_rectangles()
    masks = segvec.auto_segment(img, 8)
    kept, decisions = segvec.filter_by_impact(masks, img)
    assert len(kept) == 4
    assert len(decisions) == len(masks)
    paths = segvec.trace_mask(masks[kept[1]], img)
    assert len(paths) == 1 and paths[0].segment_count == 4


def test_vectorize_small():
    cfg = segvec.PipelineConfig()
    cfg.phase1_iters = 50
    cfg.phase2_iters = 50
    doc, report = segvec.vectorize(three_rectangles(), cfg)
    assert len(doc.paths) == 3
    assert report["optimizer"]["total_iters"] == 100
    assert report["final_mse"] < 5e-3
    assert segvec.mse_loss(segvec.render(doc), three_rectangles()) == pytest.approx(report["final_mse"])
