use lanefog_core::depth::{save_depth_png16, synth_ground_plane_depth, GroundPlaneModel};

use crate::util::{validate, CliResult};
use crate::DepthSynthArgs;

pub fn run(args: &DepthSynthArgs) -> CliResult<u8> {
    let model = validate(GroundPlaneModel::new(
        args.horizon,
        args.gp_scale,
        args.gp_dmin,
        args.gp_dmax,
    ))?;
    let map = validate(synth_ground_plane_depth(args.width, args.height, &model))?;
    if let Some(parent) = args.out.parent() {
        std::fs::create_dir_all(parent)?;
    }
    save_depth_png16(&map, &args.out)?;
    eprintln!(
        "wrote {}x{} ground-plane depth to {}",
        args.width,
        args.height,
        args.out.display()
    );
    Ok(0)
}
