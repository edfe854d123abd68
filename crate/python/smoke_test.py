"""Smoke test for the hfp extension module.

Build it with `maturin develop -m crates/python/Cargo.toml`, or build the
cdylib with `cargo build -p hfp-python --release --features extension-module`
and put `target/release/libhfp.so` on the path as `hfp.so`.
"""

import pathlib

import hfp

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"


def main():
    z4 = hfp.Group.cyclic(4)
    assert z4.order() == 4 and z4.is_abelian()
    assert z4.mul(3, 3) == 2 and z4.inv(1) == 3

    s3 = hfp.Extension.builtin("S3/A3")
    sec = s3.sections()
    assert sec["total_sections"] == 3 and sec["class_count"] == 1
    report = s3.verify_bijection(2)
    assert report["pass"] and report["hfp_classes"] == 1

    q8 = hfp.Extension.builtin("Q8/<i>")
    assert q8.sections()["class_count"] == 0
    assert q8.verify_bijection(2)["hfp_classes"] == 0

    z2 = hfp.Group.cyclic(2)
    ext = hfp.Extension(z4, z2, [0, 1, 0, 1])
    assert ext.kernel.order() == 2
    assert ext.kernel_cohomology(2) == [2]

    ws = hfp.Workspace([str(CORPUS)])
    assert "k_times_k" in ws.schemes()
    assert ws.cohomology("z2_on_z2", 2) == [2]
    r = ws.pipeline("k_times_k", trunc_dim=2)
    assert r["verdict"] == "PASS"
    assert r["levels"][-1]["hfp_classes"] == 2

    try:
        hfp.Group([[0, 1], [1, 1]])
    except ValueError:
        pass
    else:
        raise AssertionError("bad table accepted")

    print(f"hfp {hfp.__version__}: smoke test passed ({len(hfp.builtin_extensions())} builtin extensions)")


if __name__ == "__main__":
    main()
