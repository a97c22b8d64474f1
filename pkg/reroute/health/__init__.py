class HealthStatusId:
    """Represents the unique identifiers for health statuses."""

    CURRENT_PATH_FEASIBLE = "current_path_feasible"
    ROBOT_MOVING = "robot_moving"
