"""Random patch sampling inside an embryo's bounding box"""

from .stack import BoundingBox, Patch


def extract_patches(stack, bbox, slice_lo, slice_hi, n_per_slice, patch, rng):
    """Sample ``n_per_slice`` patches from every slice in [slice_lo, slice_hi].

    Origins are uniform over every position that keeps the patch inside the
    bounding box. Draw order is slice by slice, x before y, so a seed fixes
    the full origin list."""
    bbox = BoundingBox.from_value(bbox)
    if patch < 1 or n_per_slice < 0:
        raise ValueError(f"Invalid patch size {patch} or patches per slice {n_per_slice}")
    if not bbox.fits(patch):
        raise ValueError(f"Bounding box {bbox} is too small for patch size {patch}")
    if not bbox.inside(stack.width, stack.height):
        raise ValueError(f"Bounding box {bbox} exceeds the {stack.width}x{stack.height} image")
    if not 0 <= slice_lo <= slice_hi < stack.n_slices:
        raise ValueError(
            f"Slice range {slice_lo}:{slice_hi} is outside the stack's {stack.n_slices} slices"
        )

    patches = []
    for slice_index in range(slice_lo, slice_hi + 1):
        plane = stack.slice(slice_index)
        for _ in range(n_per_slice):
            x = bbox.x + int(rng.integers(0, bbox.w - patch + 1))
            y = bbox.y + int(rng.integers(0, bbox.h - patch + 1))
            patches.append(
                Patch(
                    pixels=plane[y : y + patch, x : x + patch].copy(),
                    bit_depth=stack.bit_depth,
                    embryo_id=stack.embryo_id,
                    time_min=stack.time_min,
                    slice_index=slice_index,
                    origin_x=x,
                    origin_y=y,
                )
            )
    return patches
