from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Logging
    log_level: str = "WARNING"
    log_format: str = "console"  # console, json

    # Execution
    explain_workers: int = 1
    default_seed: int = 42

    # Contribution kernel
    max_background_rows: int = 1000
    interaction_preference: float = 1.0

    # Uncertainty / Shapley
    uncertainty_permutations: int = 100  # sampled orders per report
    exhaustive_shapley_max_features: int = 8

    # Model zoo defaults
    gbm_n_trees: int = 200
    gbm_learning_rate: float = 0.1
    gbm_max_depth: int = 2
    rf_n_trees: int = 100
    rf_max_depth: int = 4
    min_leaf_size: int = 5

    # External model bridge
    external_batch_size: int = 1000
    external_startup_timeout: float = 10.0  # seconds
    external_response_timeout: float = 30.0  # seconds

    # Benchmark
    bench_observations: int = 50
    bench_split_fraction: float = 0.7

    # Rendering
    svg_width: int = 720
    svg_height: int = 0  # 0 = derived from the number of bars
    svg_positive_color: str = "#4a9b5b"
    svg_negative_color: str = "#c7473f"
    svg_intercept_color: str = "#5b7fb5"
    text_precision: int = 4

    class Config:
        env_file = ".env"
        extra = "ignore"


settings = Settings()
