use clap::Parser;
use sere_service::ServeArgs;

/// Serves the explorer API and web UI.
#[derive(Parser)]
#[command(name = "sere-server", version)]
struct Cli {
    #[command(flatten)]
    serve: ServeArgs,
}

#[tokio::main]
async fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = sere_service::serve(cli.serve).await {
        log::error!("{e}");
        std::process::exit(1);
    }
}
